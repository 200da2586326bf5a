#include "wvd/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "wvd/errors.hpp"

namespace wvd {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

bool HyperParams::is_compact() const {
    return finite_positive(alpha) && finite_positive(p) && finite_positive(q) &&
           std::isfinite(beta) && beta >= 0.0 && alpha > positive_part(1.0 / p - 0.5);
}

bool HyperParams::is_valid() const {
    if (!is_compact()) return false;
    return p >= 2.0 || alpha + beta > 1.0 / p;
}

void HyperParams::validate() const {
    if (!finite_positive(alpha) || !finite_positive(p) || !finite_positive(q)) {
        throw ValidationError("hyper-parameters: alpha, p and q must be finite and positive");
    }
    if (!std::isfinite(beta) || beta < 0.0) {
        throw ValidationError("hyper-parameters: beta must be finite and non-negative");
    }
    if (!(alpha > positive_part(1.0 / p - 0.5))) {
        std::ostringstream msg;
        msg << "hyper-parameters: alpha = " << alpha << " must exceed (1/p - 1/2)_+ = "
            << positive_part(1.0 / p - 0.5) << " (compactness)";
        throw ValidationError(msg.str());
    }
    if (p < 2.0 && !(alpha + beta > 1.0 / p)) {
        std::ostringstream msg;
        msg << "hyper-parameters: alpha + beta = " << alpha + beta << " must exceed 1/p = " << 1.0 / p
            << " when p < 2";
        throw ValidationError(msg.str());
    }
}

std::string_view to_string(Zone zone) {
    switch (zone) {
        case Zone::Dense: return "Dense";
        case Zone::Sparse: return "Sparse";
        case Zone::Critical: return "Critical";
        case Zone::Invalid: return "Invalid";
    }
    return "Invalid";
}

Zone zone_from_string(std::string_view name) {
    std::string lower(name);
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "dense") return Zone::Dense;
    if (lower == "sparse") return Zone::Sparse;
    if (lower == "critical") return Zone::Critical;
    if (lower == "invalid") return Zone::Invalid;
    throw ValidationError("unknown zone name '" + std::string(name) + "'");
}

std::size_t level_size(int j) {
    if (j < 0 || j > 40) throw ValidationError("level index out of range: " + std::to_string(j));
    return std::size_t{1} << j;
}

MultiresSequence::MultiresSequence(int j0, std::vector<std::vector<double>> levels)
    : j0_(j0), levels_(std::move(levels)) {
    if (j0_ < 0) throw ValidationError("multires sequence: j0 must be non-negative");
    if (levels_.empty()) throw ValidationError("multires sequence: at least one level required (jmax >= j0)");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        const int j = j0_ + static_cast<int>(i);
        if (levels_[i].size() != level_size(j)) {
            std::ostringstream msg;
            msg << "multires sequence: level length mismatch at level j=" << j << ": expected "
                << level_size(j) << ", got " << levels_[i].size();
            throw ValidationError(msg.str());
        }
        for (double v : levels_[i]) {
            if (!std::isfinite(v)) {
                throw ValidationError("multires sequence: non-finite coefficient at level " +
                                      std::to_string(j));
            }
        }
    }
}

MultiresSequence MultiresSequence::zeros(int j0, int jmax) {
    if (jmax < j0) throw ValidationError("multires sequence: jmax must be >= j0");
    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(jmax - j0 + 1));
    for (int j = j0; j <= jmax; ++j) levels.emplace_back(level_size(j), 0.0);
    return MultiresSequence(j0, std::move(levels));
}

std::span<const double> MultiresSequence::level(int j) const {
    if (!has_level(j)) throw ValidationError("multires sequence: level " + std::to_string(j) + " not stored");
    return levels_[static_cast<std::size_t>(j - j0_)];
}

std::span<double> MultiresSequence::level(int j) {
    if (!has_level(j)) throw ValidationError("multires sequence: level " + std::to_string(j) + " not stored");
    return levels_[static_cast<std::size_t>(j - j0_)];
}

bool MultiresSequence::same_shape(const MultiresSequence& other) const {
    return j0_ == other.j0_ && levels_.size() == other.levels_.size();
}

std::size_t MultiresSequence::total_size() const {
    std::size_t n = 0;
    for (const auto& lvl : levels_) n += lvl.size();
    return n;
}

void BesovBall::validate() const {
    gamma.validate();
    if (!finite_positive(radius)) throw ValidationError("Besov ball: radius must be positive");
}

NoiseSpec NoiseSpec::white(double epsilon, double beta) {
    NoiseSpec spec;
    spec.epsilon = epsilon;
    spec.beta = beta;
    return spec;
}

NoiseSpec NoiseSpec::tridiagonal(double epsilon, double beta, double rho) {
    NoiseSpec spec;
    spec.epsilon = epsilon;
    spec.beta = beta;
    spec.covariance = CovarianceKind::Tridiagonal;
    spec.rho = rho;
    spec.xi0 = 1.0 - 2.0 * std::abs(rho);
    spec.xi1 = 1.0 + 2.0 * std::abs(rho);
    return spec;
}

double NoiseSpec::level_scale(int j) const { return epsilon * std::exp2(beta * j); }

void NoiseSpec::validate() const {
    if (!std::isfinite(epsilon) || epsilon < 0.0) throw ValidationError("noise: epsilon must be finite and >= 0");
    if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("noise: beta must be finite and >= 0");
    if (!finite_positive(xi0) || !std::isfinite(xi1) || xi1 < xi0) {
        throw ValidationError("noise: eigenvalue bounds must satisfy 0 < xi0 <= xi1");
    }
    double lo = 1.0;
    double hi = 1.0;
    if (covariance == CovarianceKind::Tridiagonal) {
        if (!std::isfinite(rho) || !(std::abs(rho) < 0.5)) {
            throw ValidationError("noise: tridiagonal covariance needs |rho| < 1/2 (positive definite)");
        }
        lo = 1.0 - 2.0 * std::abs(rho);
        hi = 1.0 + 2.0 * std::abs(rho);
    }
    constexpr double slack = 1e-12;
    if (xi0 > lo * (1.0 + slack) || xi1 < hi * (1.0 - slack)) {
        std::ostringstream msg;
        msg << "noise: reported bounds [" << xi0 << ", " << xi1 << "] do not enclose the spectrum ["
            << lo << ", " << hi << "]";
        throw ValidationError(msg.str());
    }
}

double lp_norm(std::span<const double> values, double p) {
    double scale = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("lp norm: non-finite coefficient");
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) return 0.0;
    if (std::isinf(p)) return scale;
    double sum = 0.0;
    for (double v : values) sum += std::pow(std::abs(v) / scale, p);
    return scale * std::pow(sum, 1.0 / p);
}

double besov_norm(const MultiresSequence& theta, const HyperParams& gamma) {
    if (!finite_positive(gamma.p) || !finite_positive(gamma.q) || !std::isfinite(gamma.alpha)) {
        throw ValidationError("besov norm: p, q must be positive and alpha finite");
    }
    const double weight_exponent = gamma.alpha - 1.0 / gamma.p + 0.5;
    std::vector<double> weighted;
    weighted.reserve(theta.level_count());
    for (int j = theta.j0(); j <= theta.jmax(); ++j) {
        weighted.push_back(std::exp2(weight_exponent * j) * lp_norm(theta.level(j), gamma.p));
    }
    return lp_norm(weighted, gamma.q);
}

double shell_radius(const BesovBall& ball, int j) {
    if (j < 0) throw ValidationError("shell radius: level must be >= 0");
    return ball.radius * std::exp2(-ball.gamma.shell_exponent() * j);
}

Zone classify_zone(const HyperParams& gamma, std::optional<Zone> declared) {
    if (!gamma.is_valid()) return Zone::Invalid;
    if (declared && *declared != Zone::Invalid) {
        if (*declared == Zone::Dense || gamma.p < 2.0) return *declared;
    }
    const double boundary = gamma.critical_alpha();
    if (gamma.p >= 2.0 || gamma.alpha > boundary + kCriticalTolerance) return Zone::Dense;
    if (std::abs(gamma.alpha - boundary) <= kCriticalTolerance) return Zone::Critical;
    return Zone::Sparse;
}

bool membership(const MultiresSequence& theta, const BesovBall& ball) {
    return besov_norm(theta, ball.gamma) <= ball.radius * (1.0 + 1e-12);
}

}  // namespace wvd
