#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wvd {

/// Smoothness/integration/ill-posedness parameters (alpha, p, q, beta).
struct HyperParams {
    double alpha{1.0};
    double p{2.0};
    double q{2.0};
    double beta{0.0};

    /// alpha > (1/p - 1/2)_+ : the Besov ball is compact in l2.
    [[nodiscard]] bool is_compact() const;
    /// Compactness plus alpha + beta > 1/p when p < 2.
    [[nodiscard]] bool is_valid() const;
    /// Throws ValidationError naming the violated condition.
    void validate() const;

    /// a = alpha + 1/2 - 1/p, the geometric decay exponent of shell radii.
    [[nodiscard]] double shell_exponent() const { return alpha + 0.5 - 1.0 / p; }
    /// (2 beta + 1)(1/p - 1/2), the dense/sparse boundary value of alpha.
    [[nodiscard]] double critical_alpha() const { return (2.0 * beta + 1.0) * (1.0 / p - 0.5); }
};

enum class Zone { Dense, Sparse, Critical, Invalid };

[[nodiscard]] std::string_view to_string(Zone zone);
/// Parses "Dense"/"Sparse"/"Critical"/"Invalid" (case-insensitive).
[[nodiscard]] Zone zone_from_string(std::string_view name);

/// Tolerance on |alpha - critical_alpha| below which a parameter is Critical.
inline constexpr double kCriticalTolerance = 1e-12;

/// Coefficients theta_j for j = j0 .. jmax; level j holds 2^j values.
/// Levels above jmax are implicitly zero.
class MultiresSequence {
public:
    MultiresSequence() = default;
    /// Validates level lengths (2^j) and finiteness.
    MultiresSequence(int j0, std::vector<std::vector<double>> levels);

    /// All-zero sequence on levels j0..jmax.
    static MultiresSequence zeros(int j0, int jmax);

    [[nodiscard]] int j0() const { return j0_; }
    [[nodiscard]] int jmax() const { return j0_ + static_cast<int>(levels_.size()) - 1; }
    [[nodiscard]] std::size_t level_count() const { return levels_.size(); }
    [[nodiscard]] bool has_level(int j) const { return j >= j0_ && j <= jmax(); }

    [[nodiscard]] std::span<const double> level(int j) const;
    [[nodiscard]] std::span<double> level(int j);
    [[nodiscard]] const std::vector<std::vector<double>>& levels() const { return levels_; }

    [[nodiscard]] bool same_shape(const MultiresSequence& other) const;
    [[nodiscard]] std::size_t total_size() const;

    friend bool operator==(const MultiresSequence&, const MultiresSequence&) = default;

private:
    int j0_{1};
    std::vector<std::vector<double>> levels_;
};

/// Length of a dyadic level, 2^j.
[[nodiscard]] std::size_t level_size(int j);

/// The set of sequences with Besov norm at most `radius`.
struct BesovBall {
    HyperParams gamma;
    double radius{1.0};

    void validate() const;
};

enum class CovarianceKind { Identity, Tridiagonal };

/// Per-level noise: eps_j = epsilon * 2^{beta j}, covariance Sigma_j with
/// xi0 * I <= Sigma_j <= xi1 * I on every level.
struct NoiseSpec {
    double epsilon{0.0};
    double beta{0.0};
    CovarianceKind covariance{CovarianceKind::Identity};
    double rho{0.0};  ///< off-diagonal of the stationary tridiagonal Sigma_j
    double xi0{1.0};
    double xi1{1.0};

    /// White noise with xi0 = xi1 = 1.
    static NoiseSpec white(double epsilon, double beta);
    /// Tridiagonal Sigma_j = I + rho (shift + shift^T); bounds 1 -/+ 2|rho|.
    static NoiseSpec tridiagonal(double epsilon, double beta, double rho);

    [[nodiscard]] double level_scale(int j) const;
    void validate() const;
};

/// (sum_j 2^{(alpha - 1/p + 1/2) q j} ||theta_j||_p^q)^{1/q} over stored levels.
[[nodiscard]] double besov_norm(const MultiresSequence& theta, const HyperParams& gamma);

/// l_p (quasi-)norm of a vector, computed with max-scaling.
[[nodiscard]] double lp_norm(std::span<const double> values, double p);

/// C_j = C 2^{-a j}, the bound on ||theta_j||_p inside the ball.
[[nodiscard]] double shell_radius(const BesovBall& ball, int j);

/// Rate zone of gamma; `declared` overrides the tolerance-based critical test
/// when gamma itself is valid.
[[nodiscard]] Zone classify_zone(const HyperParams& gamma,
                                 std::optional<Zone> declared = std::nullopt);

/// besov_norm(theta) <= radius, up to a relative 1e-12 round-off allowance.
[[nodiscard]] bool membership(const MultiresSequence& theta, const BesovBall& ball);

}  // namespace wvd
