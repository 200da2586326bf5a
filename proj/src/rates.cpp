#include "wvd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "wvd/errors.hpp"
#include "wvd/estimator.hpp"

namespace wvd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

void check_snr(double C, double epsilon) {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0) || !std::isfinite(C) || !(epsilon < C)) {
        std::ostringstream msg;
        msg << "rates: need 0 < eps < C (got eps = " << epsilon << ", C = " << C << ")";
        throw ValidationError(msg.str());
    }
}

void check_valid(const HyperParams& gamma) {
    gamma.validate();
}

// delta = alpha + beta - 1/p + 1/2, the decay rate of C_j / eps_j in log2 units.
double snr_decay(const HyperParams& gamma) { return gamma.shell_exponent() + gamma.beta; }

// log2(C_j / eps_j).
double log2_level_snr(const HyperParams& gamma, double C, double epsilon, double j) {
    return std::log2(C / epsilon) - snr_decay(gamma) * j;
}

}  // namespace

std::string_view to_string(ShellBranch branch) {
    switch (branch) {
        case ShellBranch::LargeSignal: return "large-signal";
        case ShellBranch::Sparse: return "sparse";
        case ShellBranch::HighlySparse: return "highly-sparse";
        case ShellBranch::SmallSignal: return "small-signal";
    }
    return "large-signal";
}

ShellBranch control_branch(double n, double p, double C) {
    if (!std::isfinite(n) || n < 1.0) throw ValidationError("control function: n must be >= 1");
    if (!std::isfinite(p) || !(p > 0.0)) throw ValidationError("control function: p must be > 0");
    if (std::isnan(C) || C < 0.0) throw ValidationError("control function: C must be >= 0");
    const double dense_edge = std::pow(n, 1.0 / p);
    if (p >= 2.0) return C <= dense_edge ? ShellBranch::SmallSignal : ShellBranch::LargeSignal;
    if (C <= std::sqrt(1.0 + std::log(n))) return ShellBranch::HighlySparse;
    if (C < dense_edge) return ShellBranch::Sparse;
    return ShellBranch::LargeSignal;
}

double control_function(double n, double p, double C) {
    switch (control_branch(n, p, C)) {
        case ShellBranch::LargeSignal: return n;
        case ShellBranch::HighlySparse: return C * C;
        case ShellBranch::SmallSignal: return std::pow(n, 1.0 - 2.0 / p) * C * C;
        case ShellBranch::Sparse: {
            const double cp = std::pow(C, p);
            return cp * std::pow(1.0 + std::log(n / cp), 1.0 - p / 2.0);
        }
    }
    return kNaN;
}

double rate_exponent(const HyperParams& gamma, std::optional<Zone> declared) {
    const Zone zone = classify_zone(gamma, declared);
    const double a = gamma.alpha;
    const double b = gamma.beta;
    const double p = gamma.p;
    switch (zone) {
        case Zone::Dense: return 2.0 * a / (2.0 * a + 2.0 * b + 1.0);
        case Zone::Sparse: return (2.0 * a - 2.0 / p + 1.0) / (2.0 * a + 2.0 * b - 2.0 / p + 1.0);
        case Zone::Critical: return 1.0 - p / 2.0;
        case Zone::Invalid: break;
    }
    check_valid(gamma);
    throw ValidationError("rate exponent: invalid hyper-parameters");
}

double j_star(const HyperParams& gamma, double C, double epsilon) {
    if (!(epsilon > 0.0) || !(C > 0.0) || C < epsilon) throw ValidationError("j_star: need 0 < eps <= C");
    return std::log2(C / epsilon) / (gamma.alpha + gamma.beta + 0.5);
}

double j_plus(const HyperParams& gamma, double C, double epsilon) {
    if (!(gamma.p > 0.0 && gamma.p < 2.0)) throw ValidationError("j_plus: defined only for 0 < p < 2");
    if (!(epsilon > 0.0) || !(C > 0.0) || C < epsilon) throw ValidationError("j_plus: need 0 < eps <= C");
    const double delta = snr_decay(gamma);
    if (!(delta > 0.0)) {
        std::ostringstream msg;
        msg << "j_plus: alpha + beta - 1/p + 1/2 = " << delta << " must be positive";
        throw ValidationError(msg.str());
    }
    const double log_ratio = std::log(C / epsilon);
    if (log_ratio == 0.0) return 0.0;
    // Strictly increasing in j >= 0; f(0) < 0 <= f(hi).
    const auto f = [&](double j) {
        return delta * j * std::numbers::ln2 + 0.5 * std::log1p(j * std::numbers::ln2) - log_ratio;
    };
    const double hi = log_ratio / (delta * std::numbers::ln2);
    if (f(hi) == 0.0) return hi;
    std::uintmax_t iterations = 200;
    const auto [lo_root, hi_root] =
        boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (lo_root + hi_root);
}

double r_star(const HyperParams& gamma, double C, double epsilon) {
    return epsilon * epsilon * std::exp2((2.0 * gamma.beta + 1.0) * j_star(gamma, C, epsilon));
}

double r_plus(const HyperParams& gamma, double C, double epsilon) {
    return C * C * std::exp2(-2.0 * gamma.shell_exponent() * j_plus(gamma, C, epsilon));
}

RateReport rate_control(const HyperParams& gamma, double C, double epsilon, std::optional<Zone> declared) {
    check_snr(C, epsilon);
    RateReport report;
    report.gamma = gamma;
    report.radius = C;
    report.epsilon = epsilon;
    report.zone = classify_zone(gamma, declared);
    if (report.zone == Zone::Invalid) check_valid(gamma);
    report.r = rate_exponent(gamma, declared);
    const double r = report.r;
    const double log_factor = 1.0 + std::log(C / epsilon);
    report.rate_value = std::pow(C, 2.0 * (1.0 - r)) * std::pow(epsilon, 2.0 * r);
    if (report.zone == Zone::Sparse) {
        report.rate_value *= std::pow(log_factor, r);
    } else if (report.zone == Zone::Critical) {
        report.rate_value *= std::pow(log_factor, r + positive_part(1.0 - gamma.p / gamma.q));
    }
    report.j_star = j_star(gamma, C, epsilon);
    report.R_star = r_star(gamma, C, epsilon);
    if (gamma.p < 2.0) {
        report.j_plus = j_plus(gamma, C, epsilon);
        report.R_plus = C * C * std::exp2(-2.0 * gamma.shell_exponent() * report.j_plus);
    } else {
        report.j_plus = kNaN;
        report.R_plus = kNaN;
    }
    return report;
}

ShellBranch shell_branch(const HyperParams& gamma, double C, double epsilon, double j) {
    if (!(j >= 0.0)) throw ValidationError("shell risk: level must be >= 0");
    if (!(epsilon > 0.0) || !(C >= 0.0)) throw ValidationError("shell risk: need eps > 0 and C >= 0");
    const double snr = C == 0.0 ? 0.0 : std::exp2(log2_level_snr(gamma, C, epsilon, j));
    return control_branch(std::exp2(j), gamma.p, snr);
}

double shell_risk(const HyperParams& gamma, double C, double epsilon, double j) {
    if (!(j >= 0.0)) throw ValidationError("shell risk: level must be >= 0");
    if (!(epsilon > 0.0) || !(C >= 0.0)) throw ValidationError("shell risk: need eps > 0 and C >= 0");
    const double eps_j = epsilon * std::exp2(gamma.beta * j);
    const double snr = C == 0.0 ? 0.0 : std::exp2(log2_level_snr(gamma, C, epsilon, j));
    return eps_j * eps_j * control_function(std::exp2(j), gamma.p, snr);
}

double shell_risk_closed_form(const HyperParams& gamma, double C, double epsilon, double j) {
    const double js = j_star(gamma, C, epsilon);
    const double Rs = r_star(gamma, C, epsilon);
    if (j <= js) return Rs * std::exp2((2.0 * gamma.beta + 1.0) * (j - js));
    if (gamma.p >= 2.0) return Rs * std::exp2(-2.0 * gamma.alpha * (j - js));
    const double jp = j_plus(gamma, C, epsilon);
    if (j < jp) {
        const double p = gamma.p;
        const double rho = gamma.alpha - gamma.critical_alpha();
        const double phi = p * (gamma.alpha + gamma.beta + 0.5) * std::numbers::ln2;
        return Rs * std::exp2(-p * rho * (j - js)) * std::pow(1.0 + phi * (j - js), 1.0 - p / 2.0);
    }
    const double a = gamma.shell_exponent();
    const double Rp = C * C * std::exp2(-2.0 * a * jp);
    return Rp * std::exp2(-2.0 * a * (j - jp));
}

ShellRiskProfile shell_profile(const HyperParams& gamma, double C, double epsilon, double j_end, double step) {
    if (!(step > 0.0) || !std::isfinite(j_end) || j_end < 0.0) {
        throw ValidationError("shell profile: need step > 0 and j_end >= 0");
    }
    ShellRiskProfile profile;
    const auto count = static_cast<std::size_t>(std::floor(j_end / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        const double j = static_cast<double>(i) * step;
        profile.j.push_back(j);
        profile.risk.push_back(shell_risk(gamma, C, epsilon, j));
        profile.branch.push_back(shell_branch(gamma, C, epsilon, j));
    }
    return profile;
}

double ideal_risk_control_constant(const PenaltyConfig& cfg) {
    return kIdealRiskControlConstant * std::max(1.0, cfg.xi1 * cfg.zeta) * (1.0 + 2.0 * cfg.beta);
}

double complexity_term(const PenaltyConfig& cfg, double epsilon, int j0) {
    cfg.validate();
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw ValidationError("complexity term: need 0 < eps < 1");
    if (j0 < 0) throw ValidationError("complexity term: j0 must be >= 0");
    const double je = jeps(cfg, epsilon);
    const int last = std::max(j0, static_cast<int>(std::ceil(je)) + 64);
    double sum = 0.0;
    for (int j = j0; j <= last; ++j) {
        const double eps_j = epsilon * std::exp2(cfg.beta * j);
        sum += 2.0 * cfg.xi1 * m_prime(cfg, std::exp2(j), nu_schedule(cfg, epsilon, j)) * eps_j * eps_j;
    }
    // For j > last: M'_j eps_j^2 <= C_beta eps^2 / nu_{n,j} and
    // sum_{j > last} (1 + j - j_eps)^{-2} = trigamma(last + 2 - j_eps).
    const double tail = 2.0 * cfg.xi1 * epsilon * epsilon * m_prime_bound_constant(cfg.beta, cfg.nu) / cfg.nu *
                        boost::math::trigamma(static_cast<double>(last) + 2.0 - je);
    return sum + tail;
}

double shell_term(const HyperParams& gamma, double C, double epsilon, const PenaltyConfig& cfg, int j0) {
    check_valid(gamma);
    check_snr(C, epsilon);
    cfg.validate();
    if (epsilon >= 1.0) throw ValidationError("shell term: need eps < 1 for the nu schedule");
    if (j0 < 0) throw ValidationError("shell term: j0 must be >= 0");
    const double peak = gamma.p < 2.0 ? j_plus(gamma, C, epsilon) : j_star(gamma, C, epsilon);
    const double settle = std::max(peak, jeps(cfg, epsilon));
    const double ceiling = std::max(peak, static_cast<double>(j0)) + 200.0;
    double sum = 0.0;
    for (int j = j0; j <= ceiling; ++j) {
        const double term = std::log(nu_schedule(cfg, epsilon, j)) * shell_risk(gamma, C, epsilon, j);
        sum += term;
        if (j > settle && term < 1e-12 * sum) break;
    }
    return ideal_risk_control_constant(cfg) * sum;
}

double risk_upper_bound(const HyperParams& gamma, double C, double epsilon, const PenaltyConfig& cfg, int j0) {
    const double t2 = shell_term(gamma, C, epsilon, cfg, j0);
    const double t1 = complexity_term(cfg, epsilon, j0);
    return oracle_constant(cfg.zeta) * (t1 + t2);
}

double beta_p(double p, double eta) {
    if (!(p > 0.0)) throw ValidationError("beta_p: p must be > 0");
    if (!(eta >= 0.0)) throw ValidationError("beta_p: eta must be >= 0");
    if (p >= 2.0) return std::min(eta * eta, 1.0);
    if (eta == 0.0) return 0.0;
    const double s = 1.0 - p / 2.0;
    const double tau = std::pow(eta, p);
    const double tau_peak = std::exp(-s);
    if (tau <= tau_peak) return std::min(tau * std::pow(-2.0 * std::log(tau), s), 1.0);
    const double peak_value = tau_peak * std::pow(2.0 * s, s);
    return std::min(peak_value * tau / tau_peak, 1.0);
}

double lp_minimax_lower(double n, double p, double C, double epsilon) {
    if (!std::isfinite(n) || n < 2.0) throw ValidationError("lp minimax lower bound: n must be >= 2");
    if (!(p > 0.0)) throw ValidationError("lp minimax lower bound: p must be > 0");
    if (!(C >= 0.0) || !(epsilon > 0.0)) throw ValidationError("lp minimax lower bound: need C >= 0, eps > 0");
    const double ratio = C / epsilon;
    const double eta = std::pow(n, -1.0 / p) * ratio;
    const double dense = n * epsilon * epsilon * beta_p(p, eta);
    if (p >= 2.0 || eta >= 1.0) return dense;
    const double lambda2 = 2.0 * std::log(n);
    const double delta_p = std::pow(ratio / std::sqrt(lambda2), p);
    const double whole = std::floor(delta_p);
    const double sparse = lambda2 * epsilon * epsilon * (whole + std::pow(delta_p - whole, 2.0 / p));
    return std::min(dense, sparse);
}

bool sparse_dense_identity_check(const HyperParams& gamma) {
    if (!(gamma.p > 0.0 && gamma.p < 2.0)) throw ValidationError("identity check: requires 0 < p < 2");
    constexpr double tol = 1e-12;
    const double a = gamma.alpha;
    const double b = gamma.beta;
    const double ip = 1.0 / gamma.p;
    const double lhs = a / (a + b + 0.5);
    const double rhs = (a - ip + 0.5) / (a + b - ip + 0.5);
    const bool ratio_side = lhs >= rhs - tol;
    const bool alpha_side = a <= gamma.critical_alpha() + tol;
    return ratio_side == alpha_side;
}

}  // namespace wvd
