#include "wvd/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "wvd/errors.hpp"

namespace wvd {

namespace {

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError(std::string(what) + ": non-finite input");
    }
}

void check_noise_scale(double epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) throw ValidationError("estimator: epsilon must be finite and >= 0");
}

// Indices ordered by decreasing |values|, stable.
std::vector<std::size_t> order_by_magnitude(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        return std::abs(values[a]) > std::abs(values[b]);
    });
    return order;
}

struct ScanResult {
    std::size_t k{0};
    double objective{0.0};
};

// argmin_k sum_{i>k} v_(i)^2 + eps^2 pen(k); smallest k on ties.
ScanResult scan_order_statistics(std::span<const double> values, std::span<const std::size_t> order,
                                 const PenaltyConfig& cfg, double epsilon, double nu_eff) {
    const std::size_t n = values.size();
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const double v = values[order[i]];
        tail[i] = tail[i + 1] + v * v;
    }
    const double eps2 = epsilon * epsilon;
    ScanResult best{0, tail[0]};
    for (std::size_t k = 1; k <= n; ++k) {
        const double objective = tail[k] + eps2 * pen(cfg, n, k, nu_eff);
        if (objective < best.objective) best = {k, objective};
    }
    return best;
}

bool lexicographically_less(std::uint32_t a, std::uint32_t b) {
    // Sorted index lists of two supports of equal size: the first differing
    // element decides, and it is the lowest bit where the masks differ.
    const std::uint32_t diff = a ^ b;
    const std::uint32_t lowest = diff & (~diff + 1u);
    return (a & lowest) != 0u;
}

}  // namespace

MonoscaleFit select_k(std::span<const double> y, const PenaltyConfig& cfg, double epsilon, double nu_eff) {
    if (y.empty()) throw ValidationError("select_k: empty input");
    check_finite(y, "select_k");
    check_noise_scale(epsilon);
    cfg.validate_basic();

    const auto order = order_by_magnitude(y);
    const auto scan = scan_order_statistics(y, order, cfg, epsilon, nu_eff);

    MonoscaleFit fit;
    fit.k_hat = scan.k;
    fit.objective = scan.objective;
    fit.estimate.assign(y.size(), 0.0);
    if (scan.k == 0) {
        fit.threshold = std::numeric_limits<double>::infinity();
        return fit;
    }
    fit.threshold = epsilon * threshold_t(cfg, y.size(), scan.k, nu_eff);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::abs(y[i]) > fit.threshold) fit.estimate[i] = y[i];
    }
    return fit;
}

SubsetOracleResult subset_oracle(std::span<const double> y, const PenaltyConfig& cfg, double epsilon,
                                 double nu_eff) {
    const std::size_t n = y.size();
    if (n == 0) throw ValidationError("subset_oracle: empty input");
    if (n > kSubsetOracleMaxSize) {
        throw ValidationError("subset_oracle: exhaustive search limited to n <= " +
                              std::to_string(kSubsetOracleMaxSize) + ", got " + std::to_string(n));
    }
    check_finite(y, "subset_oracle");
    check_noise_scale(epsilon);
    cfg.validate_basic();

    const std::uint32_t full = (std::uint32_t{1} << n) - 1u;
    // mass[m] = sum_{i in m} y_i^2, built by additions only.
    std::vector<double> mass(std::size_t{full} + 1, 0.0);
    for (std::uint32_t m = 1; m <= full; ++m) {
        const int low = std::countr_zero(m);
        mass[m] = mass[m & (m - 1u)] + y[static_cast<std::size_t>(low)] * y[static_cast<std::size_t>(low)];
    }
    std::vector<double> penalty(n + 1);
    for (std::size_t k = 0; k <= n; ++k) penalty[k] = epsilon * epsilon * pen(cfg, n, k, nu_eff);

    std::uint32_t best_mask = 0;
    double best = mass[full];
    for (std::uint32_t m = 1; m <= full; ++m) {
        const double objective = mass[full ^ m] + penalty[static_cast<std::size_t>(std::popcount(m))];
        if (objective < best) {
            best = objective;
            best_mask = m;
        } else if (objective == best) {
            const int size_m = std::popcount(m);
            const int size_best = std::popcount(best_mask);
            if (size_m < size_best || (size_m == size_best && lexicographically_less(m, best_mask))) {
                best_mask = m;
            }
        }
    }

    SubsetOracleResult result;
    result.objective = best;
    for (std::size_t i = 0; i < n; ++i) {
        if (best_mask & (std::uint32_t{1} << i)) result.support.push_back(i);
    }
    return result;
}

std::vector<double> project(std::span<const double> y, std::span<const std::size_t> support) {
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i : support) {
        if (i >= y.size()) throw ValidationError("project: support index out of range");
        out[i] = y[i];
    }
    return out;
}

double ideal_risk(std::span<const double> theta, const PenaltyConfig& cfg, double epsilon, double nu_eff) {
    if (theta.empty()) return 0.0;
    check_finite(theta, "ideal_risk");
    check_noise_scale(epsilon);
    cfg.validate_basic();
    const auto order = order_by_magnitude(theta);
    return scan_order_statistics(theta, order, cfg, epsilon, nu_eff).objective;
}

double ideal_risk_coordinate_bound(std::span<const double> theta, const PenaltyConfig& cfg, double epsilon,
                                   double nu_eff) {
    check_finite(theta, "ideal_risk_coordinate_bound");
    const auto order = order_by_magnitude(theta);
    double sum = 0.0;
    for (std::size_t k = 1; k <= theta.size(); ++k) {
        const double v = theta[order[k - 1]];
        const double lambda = epsilon * threshold_lambda(cfg, theta.size(), k, nu_eff);
        sum += std::min(v * v, lambda * lambda);
    }
    return sum;
}

MultiscaleFit fit_multiscale(const MultiresSequence& y, const PenaltyConfig& cfg, const NoiseSpec& noise,
                             std::optional<int> first_penalized_level) {
    noise.validate();
    cfg.validate_basic();
    if (std::abs(cfg.beta - noise.beta) > 1e-12) {
        std::ostringstream msg;
        msg << "fit_multiscale: penalty beta (" << cfg.beta << ") differs from noise beta (" << noise.beta << ")";
        throw ValidationError(msg.str());
    }
    if (cfg.xi1 < noise.xi1 * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "fit_multiscale: penalty xi1 (" << cfg.xi1 << ") is below the noise covariance bound ("
            << noise.xi1 << ")";
        throw ValidationError(msg.str());
    }

    MultiscaleFit fit;
    fit.estimate = y;
    fit.first_penalized_level = first_penalized_level.value_or(y.j0());
    fit.levels.reserve(y.level_count());
    for (int j = y.j0(); j <= y.jmax(); ++j) {
        const auto data = y.level(j);
        const double eps_j = noise.level_scale(j);
        fit.level_noise.push_back(eps_j);
        if (fit.is_passthrough(j)) {
            MonoscaleFit pass;
            pass.k_hat = data.size();
            pass.threshold = 0.0;
            pass.estimate.assign(data.begin(), data.end());
            fit.levels.push_back(std::move(pass));
            fit.nu_eff.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double nu_eff = nu_schedule(cfg, noise.epsilon, static_cast<double>(j));
        auto level_fit = select_k(data, cfg, eps_j, nu_eff);
        std::ranges::copy(level_fit.estimate, fit.estimate.level(j).begin());
        fit.levels.push_back(std::move(level_fit));
        fit.nu_eff.push_back(nu_eff);
    }
    return fit;
}

std::vector<double> empirical_risk_by_level(const MultiscaleFit& fit, const MultiresSequence& truth) {
    if (!fit.estimate.same_shape(truth)) {
        throw ValidationError("empirical_risk: estimate and truth have different level layouts");
    }
    std::vector<double> per_level;
    per_level.reserve(truth.level_count());
    for (int j = truth.j0(); j <= truth.jmax(); ++j) {
        const auto est = fit.estimate.level(j);
        const auto ref = truth.level(j);
        double sse = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double d = est[i] - ref[i];
            sse += d * d;
        }
        per_level.push_back(sse);
    }
    return per_level;
}

double empirical_risk(const MultiscaleFit& fit, const MultiresSequence& truth) {
    const auto per_level = empirical_risk_by_level(fit, truth);
    return std::accumulate(per_level.begin(), per_level.end(), 0.0);
}

double oracle_constant(double zeta) {
    if (!std::isfinite(zeta) || !(zeta > 1.0)) throw ValidationError("oracle constant: zeta must be > 1");
    const double up = zeta + 1.0;
    const double down = zeta - 1.0;
    return 2.0 * zeta * up * up * up / (down * down * down);
}

}  // namespace wvd
