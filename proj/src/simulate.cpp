#include "wvd/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "wvd/errors.hpp"
#include "wvd/rates.hpp"

namespace wvd {

namespace {

std::string lowercase(std::string_view name) {
    std::string out(name);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

int level_or_throw(double j_real, const SignalSpec& spec, const char* what) {
    const long j = std::lround(j_real);
    if (j < spec.j0 || j > spec.jmax) {
        std::ostringstream msg;
        msg << what << ": target level " << j << " (from " << j_real << ") lies outside [" << spec.j0 << ", "
            << spec.jmax << "]";
        throw ConfigurationError(msg.str());
    }
    return static_cast<int>(j);
}

// Puts m equal values into a level of length n.
void place(std::span<double> level, std::size_t m, double magnitude, Placement placement) {
    const std::size_t n = level.size();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t index = placement == Placement::Leading ? i : (i * n) / m;
        level[index] = magnitude;
    }
}

void check_membership(const MultiresSequence& theta, const SignalSpec& spec, const char* what) {
    if (!membership(theta, BesovBall{spec.gamma, spec.radius})) {
        throw NumericalError(std::string(what) + ": generated signal lies outside the Besov ball");
    }
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, int j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(j)};
    return std::mt19937_64(seq);
}

}  // namespace

std::string_view to_string(SignalKind kind) {
    switch (kind) {
        case SignalKind::Zero: return "zero";
        case SignalKind::ShellDense: return "shell_dense";
        case SignalKind::ShellSparse: return "shell_sparse";
        case SignalKind::BesovSpread: return "besov_spread";
        case SignalKind::CriticalPrior: return "critical_prior";
    }
    return "zero";
}

SignalKind signal_kind_from_string(std::string_view name) {
    const auto lower = lowercase(name);
    if (lower == "zero") return SignalKind::Zero;
    if (lower == "shell_dense") return SignalKind::ShellDense;
    if (lower == "shell_sparse") return SignalKind::ShellSparse;
    if (lower == "besov_spread") return SignalKind::BesovSpread;
    if (lower == "critical_prior") return SignalKind::CriticalPrior;
    throw ValidationError("unknown signal kind '" + std::string(name) + "'");
}

std::string_view to_string(Placement placement) {
    return placement == Placement::Leading ? "leading" : "strided";
}

Placement placement_from_string(std::string_view name) {
    const auto lower = lowercase(name);
    if (lower == "leading") return Placement::Leading;
    if (lower == "strided") return Placement::Strided;
    throw ValidationError("unknown placement '" + std::string(name) + "'");
}

void SignalSpec::validate() const {
    gamma.validate();
    if (!std::isfinite(radius) || !(radius > 0.0)) throw ValidationError("signal: radius must be positive");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0) || !(epsilon < radius)) {
        throw ValidationError("signal: need 0 < eps < C");
    }
    if (j0 < 0 || jmax < j0 || jmax > 30) throw ValidationError("signal: need 0 <= j0 <= jmax <= 30");
    if (!std::isfinite(xi0) || !(xi0 > 0.0)) throw ValidationError("signal: xi0 must be positive");
    if (kind == SignalKind::CriticalPrior) {
        if (!(rho1 > 1.0) || !(rho2 > rho1)) throw ValidationError("signal: critical prior needs 1 < rho1 < rho2");
        if (gamma.beta > 0.0 && !(rho2 < (2.0 * gamma.beta + 1.0) / (2.0 * gamma.beta))) {
            throw ValidationError("signal: critical prior needs rho2 < (2 beta + 1) / (2 beta)");
        }
    }
}

MultiresSequence make_shell_signal(const SignalSpec& spec) {
    spec.validate();
    auto theta = MultiresSequence::zeros(spec.j0, spec.jmax);
    const BesovBall ball{spec.gamma, spec.radius};
    const double p = spec.gamma.p;
    switch (spec.kind) {
        case SignalKind::Zero: return theta;
        case SignalKind::ShellDense: {
            const int j = level_or_throw(j_star(spec.gamma, spec.radius, spec.epsilon), spec, "shell_dense");
            const double n = static_cast<double>(level_size(j));
            std::ranges::fill(theta.level(j), shell_radius(ball, j) * std::pow(n, -1.0 / p));
            break;
        }
        case SignalKind::ShellSparse: {
            if (!(p < 2.0)) throw ConfigurationError("shell_sparse: requires p < 2");
            const int j = level_or_throw(j_plus(spec.gamma, spec.radius, spec.epsilon), spec, "shell_sparse");
            const std::size_t n = level_size(j);
            const double c_j = shell_radius(ball, j);
            const double eps_j = spec.epsilon * std::exp2(spec.gamma.beta * j);
            const double eta_p = std::pow(c_j / eps_j, p) / static_cast<double>(n);
            const auto m = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(n) * eta_p))), 1, n);
            place(theta.level(j), m, c_j * std::pow(static_cast<double>(m), -1.0 / p), spec.placement);
            break;
        }
        case SignalKind::BesovSpread: {
            const double levels = static_cast<double>(spec.jmax - spec.j0 + 1);
            for (int j = spec.j0; j <= spec.jmax; ++j) {
                const double n = static_cast<double>(level_size(j));
                const double norm_j = shell_radius(ball, j) * std::pow(levels, -1.0 / spec.gamma.q);
                std::ranges::fill(theta.level(j), norm_j * std::pow(n, -1.0 / p));
            }
            break;
        }
        case SignalKind::CriticalPrior: return make_critical_signal(spec);
    }
    check_membership(theta, spec, to_string(spec.kind).data());
    return theta;
}

MultiresSequence make_critical_signal(const SignalSpec& spec) {
    spec.validate();
    if (classify_zone(spec.gamma, Zone::Critical) != Zone::Critical || spec.gamma.p >= 2.0) {
        throw ConfigurationError("critical_prior: requires critical hyper-parameters with p < 2");
    }
    const double js = j_star(spec.gamma, spec.radius, spec.epsilon);
    const int lo = static_cast<int>(std::floor(spec.rho1 * js));
    const int hi = static_cast<int>(std::ceil(spec.rho2 * js));
    if (lo + 1 < spec.j0 || hi > spec.jmax) {
        std::ostringstream msg;
        msg << "critical_prior: level range (" << lo << ", " << hi << "] exceeds stored levels [" << spec.j0
            << ", " << spec.jmax << "]";
        throw ConfigurationError(msg.str());
    }
    const double p = spec.gamma.p;
    const double snr = spec.radius / spec.epsilon;
    const double log_snr = std::log2(snr);
    const double span = static_cast<double>(hi - lo);
    constexpr double c1 = 1.0;

    std::vector<std::size_t> counts;
    bool feasible = false;
    for (int j = lo + 1; j <= hi; ++j) {
        const double raw = c1 * std::pow(snr, p) * std::exp2(-2.0 * spec.gamma.beta * j) *
                           std::pow(span, -p / spec.gamma.q) * std::pow(log_snr, -p / 2.0);
        const auto count = std::min(level_size(j), static_cast<std::size_t>(std::max(0.0, std::floor(raw))));
        counts.push_back(count);
        feasible = feasible || count >= 1;
    }
    if (!feasible) throw ConfigurationError("critical_prior: every level has fewer than one nonzero coordinate");

    double c0 = 1.0;
    for (int attempt = 0; attempt < 2000; ++attempt, c0 *= 0.95) {
        auto theta = MultiresSequence::zeros(spec.j0, spec.jmax);
        for (int j = lo + 1; j <= hi; ++j) {
            const double eps_j = spec.epsilon * std::exp2(spec.gamma.beta * j);
            const double magnitude = c0 * spec.xi0 * eps_j * std::sqrt(log_snr);
            place(theta.level(j), counts[static_cast<std::size_t>(j - lo - 1)], magnitude, spec.placement);
        }
        if (membership(theta, BesovBall{spec.gamma, spec.radius})) return theta;
    }
    throw NumericalError("critical_prior: could not scale the signal into the Besov ball");
}

MultiresSequence make_signal(const SignalSpec& spec) {
    return spec.kind == SignalKind::CriticalPrior ? make_critical_signal(spec) : make_shell_signal(spec);
}

int default_jmax(const HyperParams& gamma, double C, double epsilon, int j0) {
    const Zone zone = classify_zone(gamma);
    const double peak = zone == Zone::Dense || gamma.p >= 2.0 ? j_star(gamma, C, epsilon) : j_plus(gamma, C, epsilon);
    return std::clamp(static_cast<int>(std::ceil(peak)) + 3, j0, 20);
}

MultiresSequence sample_noise(const NoiseSpec& noise, int j0, int jmax, std::uint64_t seed, std::uint64_t stream) {
    noise.validate();
    auto z = MultiresSequence::zeros(j0, jmax);
    if (noise.epsilon == 0.0) return z;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = j0; j <= jmax; ++j) {
        auto engine = make_engine(seed, stream, j);
        auto level = z.level(j);
        const double scale = noise.level_scale(j);
        if (noise.covariance == CovarianceKind::Identity || noise.rho == 0.0) {
            for (double& v : level) v = scale * normal(engine);
            continue;
        }
        // Lower-bidiagonal Cholesky factor of I + rho (S + S^T):
        // d_0 = 1, l_i = rho / d_{i-1}, d_i = sqrt(1 - l_i^2).
        double previous_w = normal(engine);
        double d = 1.0;
        level[0] = scale * previous_w;
        for (std::size_t i = 1; i < level.size(); ++i) {
            const double l = noise.rho / d;
            d = std::sqrt(1.0 - l * l);
            const double w = normal(engine);
            level[i] = scale * (l * previous_w + d * w);
            previous_w = w;
        }
    }
    return z;
}

McResult mc_risk(const MultiresSequence& truth, const PenaltyConfig& cfg, const NoiseSpec& noise,
                 const McOptions& options) {
    if (options.replicates < 2) throw ValidationError("mc_risk: replicates must be >= 2");
    if (options.threads < 1) throw ValidationError("mc_risk: threads must be >= 1");
    noise.validate();
    cfg.validate_basic();

    const auto replicates = static_cast<std::size_t>(options.replicates);
    std::vector<std::vector<double>> per_replicate(replicates);
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(options.threads));

    const auto work = [&](std::size_t worker, std::size_t stride) {
        try {
            for (std::size_t r = worker; r < replicates; r += stride) {
                auto y = sample_noise(noise, truth.j0(), truth.jmax(), options.seed, r);
                for (int j = truth.j0(); j <= truth.jmax(); ++j) {
                    const auto t = truth.level(j);
                    auto level = y.level(j);
                    for (std::size_t i = 0; i < level.size(); ++i) level[i] += t[i];
                }
                const auto fit = fit_multiscale(y, cfg, noise, options.first_penalized_level);
                per_replicate[r] = empirical_risk_by_level(fit, truth);
            }
        } catch (...) {
            failures[worker] = std::current_exception();
        }
    };

    const auto stride = std::min<std::size_t>(static_cast<std::size_t>(options.threads), replicates);
    if (stride == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < stride; ++w) pool.emplace_back(work, w, stride);
        for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    McResult result;
    result.replicates = options.replicates;
    result.epsilon = noise.epsilon;
    result.j0 = truth.j0();
    result.per_level_sse.assign(truth.level_count(), 0.0);
    std::vector<double> totals(replicates, 0.0);
    for (std::size_t r = 0; r < replicates; ++r) {
        for (std::size_t l = 0; l < per_replicate[r].size(); ++l) {
            totals[r] += per_replicate[r][l];
            result.per_level_sse[l] += per_replicate[r][l];
        }
    }
    const double count = static_cast<double>(replicates);
    for (double& v : result.per_level_sse) v /= count;
    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= count;
    double ss = 0.0;
    for (double t : totals) ss += (t - mean) * (t - mean);
    result.mean_sse = mean;
    result.stderr_sse = std::sqrt(ss / (count - 1.0) / count);
    return result;
}

McResult mc_risk(const SignalSpec& spec, const PenaltyConfig& cfg, const NoiseSpec& noise,
                 const McOptions& options) {
    return mc_risk(make_signal(spec), cfg, noise, options);
}

RateFit fit_rate_exponent(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [eps, sse] : points) {
        if (!std::isfinite(eps) || !(eps > 0.0)) throw ValidationError("rate fit: eps must be positive");
        if (!std::isfinite(sse) || !(sse > 0.0)) throw ValidationError("rate fit: mean SSE must be positive");
        xs.push_back(std::log2(eps));
        ys.push_back(std::log2(sse));
    }
    auto distinct = xs;
    std::ranges::sort(distinct);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4) throw ValidationError("rate fit: need at least 4 distinct eps values");
    if (distinct.back() - distinct.front() < 2.0) throw ValidationError("rate fit: eps grid must span 2 octaves");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_hat = fit.slope / 2.0;
    return fit;
}

OracleCheck oracle_inequality_check(const MultiresSequence& truth, const PenaltyConfig& cfg,
                                    const NoiseSpec& noise, const McOptions& options) {
    OracleCheck check;
    check.mc = mc_risk(truth, cfg, noise, options);
    const int first = options.first_penalized_level.value_or(truth.j0());
    double complexity = 0.0;
    double ideal = 0.0;
    for (int j = truth.j0(); j <= truth.jmax(); ++j) {
        const double eps_j = noise.level_scale(j);
        const auto theta_j = truth.level(j);
        if (j < first) {
            // Unpenalized levels cost their full noise energy.
            ideal += cfg.xi1 * eps_j * eps_j * static_cast<double>(theta_j.size());
            continue;
        }
        const double nu_eff = nu_schedule(cfg, noise.epsilon, j);
        complexity += 2.0 * cfg.xi1 * m_prime(cfg, static_cast<double>(theta_j.size()), nu_eff) * eps_j * eps_j;
        ideal += ideal_risk(theta_j, cfg, eps_j, nu_eff);
    }
    check.complexity = complexity;
    check.ideal = ideal;
    check.lhs = check.mc.mean_sse;
    check.rhs = oracle_constant(cfg.zeta) * (complexity + ideal);
    check.ratio = check.rhs > 0.0 ? check.lhs / check.rhs : (check.lhs > 0.0 ? INFINITY : 0.0);
    return check;
}

OracleCheck oracle_inequality_check(const SignalSpec& spec, const PenaltyConfig& cfg, const NoiseSpec& noise,
                                    const McOptions& options) {
    return oracle_inequality_check(make_signal(spec), cfg, noise, options);
}

EquivalenceReport oracle_equivalence_batch(const EquivalenceOptions& options) {
    if (options.n_max < 1 || options.n_max > kSubsetOracleMaxSize) {
        throw ValidationError("equivalence batch: n_max must be in [1, 20]");
    }
    EquivalenceReport report;
    report.mismatches_by_n.assign(options.n_max, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t b = 0; b < options.betas.size(); ++b) {
        PenaltyConfig cfg;
        cfg.zeta = options.zeta;
        cfg.nu = options.nu;
        cfg.beta = options.betas[b];
        cfg.xi1 = options.xi1;
        cfg.validate();
        for (std::size_t n = 1; n <= options.n_max; ++n) {
            auto engine = make_engine(options.seed, b, static_cast<int>(n));
            std::vector<double> y(n);
            for (std::size_t i = 0; i < options.instances_per_n; ++i) {
                for (double& v : y) v = normal(engine);
                const auto fit = select_k(y, cfg, 1.0, cfg.nu);
                const auto oracle = subset_oracle(y, cfg, 1.0, cfg.nu);
                ++report.instances;
                if (fit.estimate != project(y, oracle.support)) {
                    ++report.mismatches;
                    ++report.mismatches_by_n[n - 1];
                }
            }
        }
    }
    return report;
}

}  // namespace wvd
