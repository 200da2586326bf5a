#include "wvd/penalty.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "wvd/errors.hpp"

namespace wvd {

namespace {

void check_n_k(std::size_t n, std::size_t k, bool allow_zero) {
    if (n == 0) throw ValidationError("penalty: n must be >= 1");
    if (k > n || (!allow_zero && k == 0)) {
        std::ostringstream msg;
        msg << "penalty: k = " << k << " out of range for n = " << n;
        throw ValidationError(msg.str());
    }
}

void check_nu_eff(double nu_eff) {
    if (!std::isfinite(nu_eff) || !(nu_eff > 1.0)) {
        throw ValidationError("penalty: effective nu must be finite and > 1");
    }
}

// Running sum of exp(x_i) without overflow.
class LogSumExp {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    [[nodiscard]] double log_value() const { return max_ + std::log(sum_); }
    [[nodiscard]] double value() const { return std::exp(log_value()); }

private:
    double max_{-std::numeric_limits<double>::infinity()};
    double sum_{0.0};
};

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

}  // namespace

void PenaltyConfig::validate_basic() const {
    if (!std::isfinite(zeta) || !(zeta > 1.0)) throw ValidationError("penalty: zeta must be > 1");
    if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("penalty: beta must be >= 0");
    if (!std::isfinite(xi1) || !(xi1 > 0.0)) throw ValidationError("penalty: xi1 must be > 0");
    if (!std::isfinite(jeps_scale) || jeps_scale < 1.0) throw ValidationError("penalty: jeps_scale must be >= 1");
    check_nu_eff(nu);
}

void PenaltyConfig::validate() const {
    validate_basic();
    if (!(nu > nu_lower_limit(beta))) {
        std::ostringstream msg;
        msg << "penalty: nu = " << nu << " must exceed e^{1/(1+2 beta)} = " << nu_lower_limit(beta);
        throw ValidationError(msg.str());
    }
    if (!penalty_is_monotone(*this, nu)) {
        std::ostringstream msg;
        msg << "penalty: nu = " << nu << " is too small for pen(k) to increase in k at beta = " << beta;
        throw ValidationError(msg.str());
    }
}

double nu_lower_limit(double beta) { return std::exp(1.0 / (1.0 + 2.0 * beta)); }

bool penalty_is_monotone(const PenaltyConfig& cfg, double nu_eff) {
    const double c = 1.0 + 2.0 * cfg.beta;
    const double s = std::sqrt(2.0 * c * std::log(nu_eff));
    return s * (1.0 + s) > 2.0 * c;
}

double log_term(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff) {
    check_n_k(n, k, false);
    check_nu_eff(nu_eff);
    return (1.0 + 2.0 * cfg.beta) * std::log(nu_eff * static_cast<double>(n) / static_cast<double>(k));
}

double threshold_lambda(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff) {
    const double L = log_term(cfg, n, k, nu_eff);
    return std::sqrt(cfg.xi1 * cfg.zeta) * (1.0 + std::sqrt(2.0 * L));
}

double pen(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff) {
    check_n_k(n, k, true);
    if (k == 0) return 0.0;
    const double lambda = threshold_lambda(cfg, n, k, nu_eff);
    return static_cast<double>(k) * lambda * lambda;
}

double threshold_t(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff) {
    check_n_k(n, k, false);
    const double increment = pen(cfg, n, k, nu_eff) - pen(cfg, n, k - 1, nu_eff);
    if (increment < 0.0) {
        std::ostringstream msg;
        msg << "penalty: pen(" << k << ") < pen(" << k - 1 << ") at n = " << n << ", nu = " << nu_eff
            << "; the penalty is not increasing for this configuration";
        throw NumericalError(msg.str());
    }
    return std::sqrt(increment);
}

double jeps(const PenaltyConfig& cfg, double epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) throw ValidationError("nu schedule: epsilon must be >= 0");
    if (epsilon >= 1.0) throw ValidationError("nu schedule: epsilon must be < 1 (j_eps would be <= 0)");
    if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
    return cfg.jeps_scale * std::log2(1.0 / (epsilon * epsilon));
}

double nu_schedule(const PenaltyConfig& cfg, double epsilon, double j) {
    const double je = jeps(cfg, epsilon);
    if (j <= je) return cfg.nu;
    const double excess = 1.0 + (j - je);
    return cfg.nu * excess * excess;
}

double m_prime(const PenaltyConfig& cfg, double n, double nu_eff) {
    if (!std::isfinite(n) || n < 1.0) throw ValidationError("m_prime: n must be >= 1");
    check_nu_eff(nu_eff);
    const double c = 1.0 + 2.0 * cfg.beta;
    const double log_q = 1.0 - c * std::log(nu_eff);  // log(e / nu^{1+2beta})
    const double k_max = std::floor(n);
    // Stop once the Stirling tail bound sum_{k>K} q^k / sqrt(2 pi k) is below
    // e^{-42} (about 6e-19) of the running sum.
    constexpr double kTailLog = -42.0;
    const double log_nu_n = std::log(nu_eff * n);

    LogSumExp total;
    double log_binom = 0.0;
    for (double k = 1.0; k <= k_max; k += 1.0) {
        log_binom += std::log((n - k + 1.0) / k);
        total.add(log_binom - k * c * (log_nu_n - std::log(k)));
        if (log_q < 0.0) {
            const double tail = (k + 1.0) * log_q - std::log1p(-std::exp(log_q)) -
                                0.5 * std::log(2.0 * std::numbers::pi * (k + 1.0));
            if (tail < total.log_value() + kTailLog) break;
        }
    }
    return total.value();
}

double m_prime_bound_constant(double beta, double nu) {
    if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("m_prime bound: beta must be >= 0");
    if (!std::isfinite(nu) || !(nu > nu_lower_limit(beta))) {
        std::ostringstream msg;
        msg << "m_prime bound: nu must exceed e^{1/(1+2 beta)} = " << nu_lower_limit(beta)
            << " for the series to converge";
        throw ValidationError(msg.str());
    }
    const double s = 2.0 * beta - 0.5;
    const double lambda = (1.0 + 2.0 * beta) * std::log(nu) - 1.0;  // -log q
    const double prefactor = std::numbers::e / std::sqrt(2.0 * std::numbers::pi);
    const auto term = [&](double k) { return prefactor * std::exp(s * std::log(k) - lambda * (k - 1.0)); };

    constexpr double kRelTol = 1e-16;
    constexpr double kDirectTerms = 1e5;
    const double mode = s > 0.0 ? s / lambda : 0.0;

    CompensatedSum sum;
    double k = 1.0;
    for (;; k += 1.0) {
        sum.add(term(k));
        // Geometric tail bound: successive-term ratio is at most r for all
        // indices beyond k + 1.
        const double ratio_cap = s > 0.0 ? std::pow((k + 2.0) / (k + 1.0), s) : 1.0;
        const double r = ratio_cap * std::exp(-lambda);
        if (r < 1.0 && term(k + 1.0) / (1.0 - r) < kRelTol * sum.value()) return sum.value();
        if (k >= kDirectTerms && k > mode) break;
    }

    // Euler-Maclaurin tail from K = k + 1 on, where f is smooth and
    // decreasing: sum_{i>K} f(i) = int_K^inf f - f(K)/2 - f'(K)/12 + f'''(K)/720.
    const double K = k + 1.0;
    const double integral = prefactor * std::exp(lambda) *
                            boost::math::tgamma(s + 1.0, lambda * K) / std::pow(lambda, s + 1.0);
    const double fK = term(K);
    const double h = s / K - lambda;
    const double dh = -s / (K * K);
    const double d2h = 2.0 * s / (K * K * K);
    const double d1 = fK * h;
    const double d3 = fK * (h * h * h + 3.0 * h * dh + d2h);
    sum.add(term(K));
    sum.add(integral - fK / 2.0 - d1 / 12.0 + d3 / 720.0);
    return sum.value();
}

}  // namespace wvd
