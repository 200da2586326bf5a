#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wvd/io.hpp"
#include "wvd/model.hpp"
#include "wvd/penalty.hpp"
#include "wvd/simulate.hpp"

namespace wvd {

/// One resolved experiment. Every field has a default; JSON keys that are
/// not listed here are rejected.
struct ExperimentConfig {
    HyperParams gamma{1.0, 2.0, 2.0, 0.5};
    std::optional<Zone> zone;  ///< declared zone override
    double radius{1.0};

    PenaltyConfig penalty;  ///< penalty.beta always equals gamma.beta
    bool penalty_xi1_set{false};

    CovarianceKind covariance{CovarianceKind::Identity};
    double rho{0.0};

    SignalKind signal{SignalKind::ShellDense};
    Placement placement{Placement::Strided};
    double rho1{1.1};
    double rho2{1.5};

    std::vector<double> epsilons{0.015625, 0.0078125, 0.00390625, 0.001953125};
    int replicates{100};
    std::uint64_t seed{1};
    int threads{1};
    int j0{1};
    std::optional<int> jmax;  ///< default_jmax per epsilon when unset
    std::optional<int> first_penalized_level;
    std::optional<bool> log_correction;  ///< divide out (1+log(C/eps))^r before the rate fit
    std::optional<double> rate_tolerance;  ///< relative |r_hat - r| / r allowed by sweep

    EquivalenceOptions equivalence;

    /// Cross-field checks; throws ValidationError or ConfigurationError.
    void validate() const;

    [[nodiscard]] NoiseSpec noise(double epsilon) const;
    [[nodiscard]] SignalSpec signal_spec(double epsilon) const;
    [[nodiscard]] int jmax_for(double epsilon) const;
    [[nodiscard]] bool uses_log_correction() const;
};

/// Fills defaults for missing keys and validates.
[[nodiscard]] ExperimentConfig experiment_from_json(const json& doc);
/// Full resolved config, defaults included.
[[nodiscard]] json experiment_to_json(const ExperimentConfig& config);

}  // namespace wvd
