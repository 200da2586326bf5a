#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wvd/estimator.hpp"
#include "wvd/model.hpp"
#include "wvd/penalty.hpp"

namespace wvd {

enum class SignalKind { Zero, ShellDense, ShellSparse, BesovSpread, CriticalPrior };

[[nodiscard]] std::string_view to_string(SignalKind kind);
[[nodiscard]] SignalKind signal_kind_from_string(std::string_view name);

/// Where the nonzero coordinates of a sparse level go.
enum class Placement { Leading, Strided };

[[nodiscard]] std::string_view to_string(Placement placement);
[[nodiscard]] Placement placement_from_string(std::string_view name);

/// Deterministic test signal on levels j0..jmax inside the Besov ball (gamma, radius).
struct SignalSpec {
    SignalKind kind{SignalKind::ShellDense};
    HyperParams gamma;
    double radius{1.0};
    double epsilon{0.01};  ///< locates j* and j+
    int j0{1};
    int jmax{10};
    Placement placement{Placement::Strided};
    double rho1{1.1};  ///< critical prior: levels in (floor(rho1 j*), ceil(rho2 j*)]
    double rho2{1.5};
    double xi0{1.0};  ///< lower noise eigenvalue bound used by the critical prior

    void validate() const;
};

/// shell_dense / shell_sparse / besov_spread / zero signals.
[[nodiscard]] MultiresSequence make_shell_signal(const SignalSpec& spec);
/// Multi-level critical-zone signal; constants shrink until the signal lies in the ball.
[[nodiscard]] MultiresSequence make_critical_signal(const SignalSpec& spec);
/// Dispatches on spec.kind.
[[nodiscard]] MultiresSequence make_signal(const SignalSpec& spec);

/// Default finest level: ceil(j+) + 3 (p < 2, non-dense zones) or ceil(j*) + 3,
/// capped at 20 and at least j0.
[[nodiscard]] int default_jmax(const HyperParams& gamma, double C, double epsilon, int j0 = 1);

/// eps_j z_j with z_j ~ N(0, Sigma) drawn independently per level. The
/// stream is a pure function of (seed, stream, j).
[[nodiscard]] MultiresSequence sample_noise(const NoiseSpec& noise, int j0, int jmax, std::uint64_t seed,
                                            std::uint64_t stream = 0);

struct McOptions {
    int replicates{100};
    std::uint64_t seed{1};
    int threads{1};
    std::optional<int> first_penalized_level;
};

struct McResult {
    int replicates{0};
    double epsilon{0.0};
    double mean_sse{0.0};
    double stderr_sse{0.0};
    int j0{1};
    std::vector<double> per_level_sse;  ///< mean SSE on each stored level
};

/// Monte Carlo estimate of E||theta_hat - theta||^2 at a fixed truth.
[[nodiscard]] McResult mc_risk(const MultiresSequence& truth, const PenaltyConfig& cfg, const NoiseSpec& noise,
                               const McOptions& options);
[[nodiscard]] McResult mc_risk(const SignalSpec& spec, const PenaltyConfig& cfg, const NoiseSpec& noise,
                               const McOptions& options);

struct RateFit {
    double slope{0.0};
    double intercept{0.0};
    double r_hat{0.0};
};

/// OLS of log2(mean_sse) on log2(eps); r_hat = slope / 2. Needs >= 4 distinct
/// eps spanning >= 2 octaves.
[[nodiscard]] RateFit fit_rate_exponent(const std::vector<std::pair<double, double>>& points);

struct OracleCheck {
    double lhs{0.0};
    double rhs{0.0};
    double ratio{0.0};
    double complexity{0.0};  ///< 2 sum_j xi1 M'_j eps_j^2
    double ideal{0.0};       ///< sum_j R_j(theta_j, eps_j)
    McResult mc;
};

/// Compares the Monte Carlo risk with D [complexity + ideal] over the stored levels.
[[nodiscard]] OracleCheck oracle_inequality_check(const MultiresSequence& truth, const PenaltyConfig& cfg,
                                                  const NoiseSpec& noise, const McOptions& options);
[[nodiscard]] OracleCheck oracle_inequality_check(const SignalSpec& spec, const PenaltyConfig& cfg,
                                                  const NoiseSpec& noise, const McOptions& options);

/// Counts of select_k vs subset_oracle disagreements on random N(0,1) data
/// (eps = 1) for every n in 1..n_max and every beta.
struct EquivalenceReport {
    std::size_t instances{0};
    std::size_t mismatches{0};
    std::vector<std::size_t> mismatches_by_n;  ///< index n - 1
};

struct EquivalenceOptions {
    std::size_t instances_per_n{1000};
    std::size_t n_max{12};
    std::vector<double> betas{0.0, 0.5};
    double zeta{2.0};
    double nu{40.0};
    double xi1{1.0};
    std::uint64_t seed{1};
};

[[nodiscard]] EquivalenceReport oracle_equivalence_batch(const EquivalenceOptions& options);

}  // namespace wvd
