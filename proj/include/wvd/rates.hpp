#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "wvd/model.hpp"
#include "wvd/penalty.hpp"

namespace wvd {

/// Minimax rate summary for one (gamma, C, eps).
struct RateReport {
    HyperParams gamma;
    double radius{1.0};
    double epsilon{0.0};
    Zone zone{Zone::Invalid};
    double r{0.0};           ///< rate exponent
    double rate_value{0.0};  ///< C^{2(1-r)} eps^{2r} times the zone's log factor
    double j_star{0.0};
    double j_plus{0.0};  ///< NaN when p >= 2
    double R_star{0.0};
    double R_plus{0.0};  ///< NaN when p >= 2
};

/// Which branch of the control function produced a shell risk value.
enum class ShellBranch { LargeSignal, Sparse, HighlySparse, SmallSignal };

[[nodiscard]] std::string_view to_string(ShellBranch branch);

struct ShellRiskProfile {
    std::vector<double> j;
    std::vector<double> risk;
    std::vector<ShellBranch> branch;
};

/// r_{n,p}(C) with n treated as a real number >= 1.
[[nodiscard]] double control_function(double n, double p, double C);
/// Branch of control_function taken at (n, p, C).
[[nodiscard]] ShellBranch control_branch(double n, double p, double C);

/// Rate exponent of the zone of gamma (or of `declared` when it applies).
[[nodiscard]] double rate_exponent(const HyperParams& gamma, std::optional<Zone> declared = std::nullopt);

/// Requires 0 < eps < C.
[[nodiscard]] RateReport rate_control(const HyperParams& gamma, double C, double epsilon,
                                      std::optional<Zone> declared = std::nullopt);

/// log2(C/eps) / (alpha + beta + 1/2).
[[nodiscard]] double j_star(const HyperParams& gamma, double C, double epsilon);

/// Root of 2^{delta j} (1 + j log 2)^{1/2} = C/eps, delta = alpha + beta - 1/p + 1/2.
[[nodiscard]] double j_plus(const HyperParams& gamma, double C, double epsilon);

/// eps^2 2^{(2 beta + 1) j*} = C^{2(1-r)} eps^{2r} with the dense exponent.
[[nodiscard]] double r_star(const HyperParams& gamma, double C, double epsilon);
/// C^2 2^{-2 a j+}; requires p < 2.
[[nodiscard]] double r_plus(const HyperParams& gamma, double C, double epsilon);

/// R_j = eps_j^2 r_{n_j,p}(C_j / eps_j) with n_j = 2^j for real j >= 0.
[[nodiscard]] double shell_risk(const HyperParams& gamma, double C, double epsilon, double j);
[[nodiscard]] ShellBranch shell_branch(const HyperParams& gamma, double C, double epsilon, double j);

/// Piecewise closed form of R_j written in terms of j*, j+, R* and R+.
[[nodiscard]] double shell_risk_closed_form(const HyperParams& gamma, double C, double epsilon, double j);

/// R_j on j = 0, step, 2 step, ... up to j_end inclusive.
[[nodiscard]] ShellRiskProfile shell_profile(const HyperParams& gamma, double C, double epsilon, double j_end,
                                             double step = 0.1);

/// Constant c with sup_{l_{n,p}(C)} ideal risk <= c log(nu) eps^2 r_{n,p}(C/eps),
/// calibrated once on spike families and frozen.
inline constexpr double kIdealRiskControlConstant = 6.0;
/// kIdealRiskControlConstant scaled by max(1, xi1 zeta) (1 + 2 beta).
[[nodiscard]] double ideal_risk_control_constant(const PenaltyConfig& cfg);

/// Complexity term 2 sum_{j >= j0} xi1 M'_j eps_j^2 under the nu schedule.
/// Levels past j_eps + 64 are replaced by a trigamma bound, so the value is
/// an upper bound. Requires 0 < eps < 1.
[[nodiscard]] double complexity_term(const PenaltyConfig& cfg, double epsilon, int j0 = 0);

/// c sum_{j >= j0} log(nu_{n,j}) R_j.
[[nodiscard]] double shell_term(const HyperParams& gamma, double C, double epsilon, const PenaltyConfig& cfg,
                                int j0 = 0);

/// D(zeta) [complexity_term + shell_term].
[[nodiscard]] double risk_upper_bound(const HyperParams& gamma, double C, double epsilon, const PenaltyConfig& cfg,
                                      int j0 = 0);

/// Order-level lower bound on the l_p-ball minimax risk at noise eps.
[[nodiscard]] double lp_minimax_lower(double n, double p, double C, double epsilon);

/// beta_p(eta): the normalized single-coordinate Bayes-minimax risk envelope.
[[nodiscard]] double beta_p(double p, double eta);

/// alpha/(alpha+beta+1/2) >= (alpha-1/p+1/2)/(alpha+beta-1/p+1/2) holds iff
/// alpha <= (2beta+1)(1/p-1/2). Returns whether both sides agree for gamma.
[[nodiscard]] bool sparse_dense_identity_check(const HyperParams& gamma);

}  // namespace wvd
