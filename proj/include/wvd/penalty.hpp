#pragma once

#include <cstddef>

namespace wvd {

/// Parameters of the complexity penalty
///   pen(k) = xi1 * zeta * k * (1 + sqrt(2 L_{n,k}))^2,
///   L_{n,k} = (1 + 2 beta) log(nu n / k).
struct PenaltyConfig {
    double zeta{2.0};
    double nu{40.0};  ///< 2/w for FDR level w = 0.05
    double beta{0.0};
    double xi1{1.0};
    double jeps_scale{1.0};  ///< K in j_eps = K log2(eps^-2)

    /// zeta > 1, beta >= 0, xi1 > 0, K >= 1 and nu > 1. Enough for every
    /// formula below to be well defined.
    void validate_basic() const;
    /// validate_basic() plus nu > e^{1/(1+2 beta)} (summable complexity) and
    /// the monotonicity condition of pen (see penalty_is_monotone).
    void validate() const;
};

/// e^{1/(1+2 beta)}: the complexity sum M' converges only above this value.
[[nodiscard]] double nu_lower_limit(double beta);

/// True when s(1+s) > 2(1+2 beta) at s = sqrt(2 (1+2beta) log nu_eff), which
/// makes pen strictly increasing in k for every n.
[[nodiscard]] bool penalty_is_monotone(const PenaltyConfig& cfg, double nu_eff);

/// L_{n,k} = (1 + 2 beta) log(nu_eff n / k), 1 <= k <= n.
[[nodiscard]] double log_term(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff);

/// pen(k); pen(0) = 0.
[[nodiscard]] double pen(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff);

/// lambda_{n,k} = sqrt(xi1 zeta) (1 + sqrt(2 L_{n,k})), so pen(k) = k lambda^2.
[[nodiscard]] double threshold_lambda(const PenaltyConfig& cfg, std::size_t n, std::size_t k,
                                      double nu_eff);

/// t_k = sqrt(pen(k) - pen(k-1)), the hard threshold (in noise units) when
/// k coordinates are kept.
[[nodiscard]] double threshold_t(const PenaltyConfig& cfg, std::size_t n, std::size_t k, double nu_eff);

/// Bound on |t_k - lambda_k| lambda_k; the largest value seen on the
/// calibration grid (n <= 2^14, zeta <= 4, beta <= 1, nu >= 2) is 30.4.
inline constexpr double kThresholdGapBound = 40.0;

/// Real-valued level at which the nu schedule starts growing.
[[nodiscard]] double jeps(const PenaltyConfig& cfg, double epsilon);

/// nu_{n,j}: nu for j <= j_eps, nu (1 + (j - j_eps))^2 beyond.
[[nodiscard]] double nu_schedule(const PenaltyConfig& cfg, double epsilon, double j);

/// M'_n = sum_{k=1}^n binom(n,k) exp(-k L_{n,k}), in log space. `n` may be a
/// real number (>= 1) so that very fine levels can be summed.
[[nodiscard]] double m_prime(const PenaltyConfig& cfg, double n, double nu_eff);

/// C_beta = sum_{k>=1} k^{2beta} e / sqrt(2 pi k) (e / nu^{1+2beta})^{k-1},
/// so that M'_n <= C_beta n^{-2 beta} / nu.
[[nodiscard]] double m_prime_bound_constant(double beta, double nu);

}  // namespace wvd
