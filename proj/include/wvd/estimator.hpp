#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wvd/model.hpp"
#include "wvd/penalty.hpp"

namespace wvd {

/// Result of penalized least squares on one vector.
struct MonoscaleFit {
    std::size_t k_hat{0};
    /// Absolute threshold eps * t_{k_hat} on the data scale; +inf when k_hat = 0.
    double threshold{0.0};
    std::vector<double> estimate;
    /// Minimized value of sum_{i > k} y_(i)^2 + eps^2 pen(k).
    double objective{0.0};
};

/// Per-level fits of a multiresolution sequence. Levels below
/// `first_penalized_level` are copied from the data.
struct MultiscaleFit {
    MultiresSequence estimate;
    int first_penalized_level{1};
    /// One entry per stored level, passthrough levels included (k_hat = size,
    /// threshold = 0, objective = 0 for those).
    std::vector<MonoscaleFit> levels;
    std::vector<double> nu_eff;  ///< nu_{n,j} used on each level (NaN for passthrough)
    std::vector<double> level_noise;  ///< eps_j on each level

    [[nodiscard]] bool is_passthrough(int j) const { return j < first_penalized_level; }
};

/// Exhaustive subset minimizer of sum_{i not in J} y_i^2 + eps^2 pen(|J|).
struct SubsetOracleResult {
    std::vector<std::size_t> support;  ///< sorted ascending, 0-based
    double objective{0.0};
};

inline constexpr std::size_t kSubsetOracleMaxSize = 20;

/// Order-statistic scan for k_hat followed by hard thresholding at eps t_{k_hat}.
/// Ties in the objective resolve to the smallest k; coordinates with
/// |y_i| == threshold are dropped.
[[nodiscard]] MonoscaleFit select_k(std::span<const double> y, const PenaltyConfig& cfg, double epsilon,
                                    double nu_eff);

/// Brute-force search over all 2^n supports (n <= 20). Among equal
/// objectives the smallest support wins, then the lexicographically smallest.
[[nodiscard]] SubsetOracleResult subset_oracle(std::span<const double> y, const PenaltyConfig& cfg,
                                               double epsilon, double nu_eff);

/// P_J y for a support J.
[[nodiscard]] std::vector<double> project(std::span<const double> y, std::span<const std::size_t> support);

/// min_k sum_{i>k} theta_(i)^2 + eps^2 pen(k) over the sorted |theta|.
[[nodiscard]] double ideal_risk(std::span<const double> theta, const PenaltyConfig& cfg, double epsilon,
                                double nu_eff);

/// sum_k min(theta_(k)^2, eps^2 lambda_{n,k}^2), an upper bound on ideal_risk.
[[nodiscard]] double ideal_risk_coordinate_bound(std::span<const double> theta, const PenaltyConfig& cfg,
                                                 double epsilon, double nu_eff);

/// Applies select_k on every level j >= first_penalized_level with
/// eps_j = eps 2^{beta j}, n = 2^j and nu_eff = nu_schedule(eps, j).
/// `first_penalized_level` defaults to the sequence's coarsest level.
[[nodiscard]] MultiscaleFit fit_multiscale(const MultiresSequence& y, const PenaltyConfig& cfg,
                                           const NoiseSpec& noise,
                                           std::optional<int> first_penalized_level = std::nullopt);

/// sum over stored levels of (estimate - truth)^2.
[[nodiscard]] double empirical_risk(const MultiscaleFit& fit, const MultiresSequence& truth);
/// Same tally split per stored level.
[[nodiscard]] std::vector<double> empirical_risk_by_level(const MultiscaleFit& fit,
                                                          const MultiresSequence& truth);

/// D(zeta) = 2 zeta (zeta+1)^3 / (zeta-1)^3, the oracle-inequality constant.
[[nodiscard]] double oracle_constant(double zeta);

}  // namespace wvd
