// Acceptance checks. Usage: wvd_acceptance [criterion...]; no argument runs all.
// Prints one PASS/FAIL line per criterion; exit code 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "wvd/experiment.hpp"
#include "wvd/penalty.hpp"
#include "wvd/rates.hpp"
#include "wvd/simulate.hpp"

using namespace wvd;

namespace {

constexpr double kIdentityRelTol = 1e-12;         // 2
constexpr double kClosedFormRelTol = 1e-10;       // 4
constexpr double kPeakIdentityRelTol = 1e-12;     // 4
constexpr double kOrderingSlack = 1e-12;          // 5
constexpr int kOracleReplicates = 200;            // 6
constexpr double kOracleRatioMax = 1.0;           // 6
constexpr int kRateReplicates = 100;              // 7, 8
constexpr double kDenseRateRelTol = 0.15;         // 7
constexpr double kSparseRateRelTol = 0.20;        // 8
constexpr double kComplexityScaledBound = 0.1;    // 9
constexpr double kBoundaryDistance = 1e-6;        // 10
constexpr double kBoundaryTol = 1e-9;             // 10

const HyperParams kPresets[] = {
    {1.0, 2.0, 2.0, 0.5},   // dense, p = 2
    {2.0, 1.0, 1.0, 0.4},   // dense, p < 2
    {1.5, 3.0, 2.0, 0.0},   // dense, p > 2
    {0.6, 1.0, 1.0, 1.0},   // sparse
    {0.75, 1.0, 1.0, 0.5},  // sparse
    {1.0, 1.0, 2.0, 0.5},   // critical
};

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

int worker_threads() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

double relative_error(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

Outcome criterion_1() {
    EquivalenceOptions opts;  // 1000 per n, n <= 12, beta in {0, 0.5}, zeta 2, nu 40, xi1 1
    const auto report = oracle_equivalence_batch(opts);
    return {report.mismatches == 0 && report.instances == 1000 * 12 * 2,
            fmt("%zu instances, %zu mismatches", report.instances, report.mismatches)};
}

Outcome criterion_2() {
    std::vector<std::size_t> sizes;
    for (std::size_t n = 1; n <= 64; ++n) sizes.push_back(n);
    for (std::size_t n = 128; n <= (1u << 14); n *= 2) {
        sizes.push_back(n - 1);
        sizes.push_back(n);
    }
    sizes.push_back(1000);
    double worst_pen = 0.0;
    double worst_sum = 0.0;
    double worst_gap = 0.0;
    for (double beta : {0.0, 0.5, 1.0}) {
        PenaltyConfig cfg;
        cfg.beta = beta;
        for (std::size_t n : sizes) {
            double running = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p = pen(cfg, n, k, cfg.nu);
                const double lambda = threshold_lambda(cfg, n, k, cfg.nu);
                const double t = threshold_t(cfg, n, k, cfg.nu);
                running += t * t;
                worst_pen = std::max(worst_pen, relative_error(k * lambda * lambda, p));
                worst_sum = std::max(worst_sum, relative_error(running, p));
                worst_gap = std::max(worst_gap, std::abs(t - lambda) * lambda);
            }
        }
    }
    const bool pass = worst_pen <= kIdentityRelTol && worst_sum <= kIdentityRelTol && worst_gap <= kThresholdGapBound;
    return {pass, fmt("max rel err pen=k*lambda^2 %.2e, sum t^2=pen %.2e (tol %.0e); max |t-lambda|*lambda %.2f "
                      "(bound %.0f)",
                      worst_pen, worst_sum, kIdentityRelTol, worst_gap, kThresholdGapBound)};
}

Outcome criterion_3() {
    double worst = 0.0;
    std::size_t failures = 0;
    for (double beta : {0.0, 0.25, 0.5, 1.0}) {
        for (double nu : {1.1 * nu_lower_limit(beta), 10.0, 40.0}) {
            PenaltyConfig cfg;
            cfg.beta = beta;
            cfg.nu = nu;
            const double bound = m_prime_bound_constant(beta, nu);
            for (std::size_t n = 1; n <= (1u << 16); ++n) {
                const double dn = static_cast<double>(n);
                const double scaled = m_prime(cfg, dn, nu) * std::pow(dn, 2.0 * beta) * nu / bound;
                worst = std::max(worst, scaled);
                failures += scaled <= 1.0 ? 0 : 1;
            }
        }
    }
    return {failures == 0, fmt("max M'_n n^{2beta} nu / C_beta = %.6f over 12 (beta, nu) x 65536 n", worst)};
}

Outcome criterion_4() {
    double worst = 0.0;
    double worst_peak = 0.0;
    std::size_t points = 0;
    for (const auto& g : kPresets) {
        for (double eps : {1e-3, std::exp2(-14)}) {
            const double js = j_star(g, 1.0, eps);
            const double jp = g.p < 2.0 ? j_plus(g, 1.0, eps) : NAN;
            const double end = (g.p < 2.0 ? jp : js) + 8.0;
            for (int i = 0; 0.1 * i <= end; ++i) {
                const double j = 0.1 * i;
                if (std::abs(j - js) < 1e-6 || (g.p < 2.0 && std::abs(j - jp) < 1e-6)) continue;
                worst = std::max(worst, relative_error(shell_risk_closed_form(g, 1.0, eps, j), shell_risk(g, 1.0, eps, j)));
                ++points;
            }
            const auto report = rate_control(g, 1.0, eps);
            const double r = report.r;
            if (report.zone == Zone::Dense) {
                worst_peak = std::max(worst_peak, relative_error(report.R_star, std::pow(eps, 2.0 * r)));
            } else if (report.zone == Zone::Sparse) {
                const double closed = std::pow(eps, 2.0 * r) * std::pow(1.0 + jp * std::log(2.0), r);
                worst_peak = std::max(worst_peak, relative_error(report.R_plus, closed));
            }
        }
    }
    return {worst <= kClosedFormRelTol && worst_peak <= kPeakIdentityRelTol,
            fmt("%zu grid points, max rel err %.2e (tol %.0e); R*/R+ identities max rel err %.2e (tol %.0e)", points,
                worst, kClosedFormRelTol, worst_peak, kPeakIdentityRelTol)};
}

Outcome criterion_5() {
    const HyperParams dense[] = {{2.0, 1.0, 1.0, 0.4}, {1.0, 1.5, 2.0, 0.25}, {2.5, 0.5, 1.0, 0.0}};
    const HyperParams sparse[] = {{0.6, 1.0, 1.0, 1.0}, {0.75, 1.0, 1.0, 0.5}, {0.4, 1.5, 2.0, 1.0}};
    std::size_t checks = 0;
    std::size_t failures = 0;
    for (double C : {1.0, 4.0, 100.0}) {
        for (int e = 8; e <= 40; ++e) {
            const double eps = C * std::exp2(-e);
            for (const auto& g : dense) {
                ++checks;
                failures += r_plus(g, C, eps) <= r_star(g, C, eps) * (1.0 + kOrderingSlack) ? 0 : 1;
            }
            for (const auto& g : sparse) {
                ++checks;
                const double at_star = shell_risk(g, C, eps, j_star(g, C, eps));
                const double at_plus = shell_risk(g, C, eps, j_plus(g, C, eps));
                failures += at_star <= at_plus * (1.0 + kOrderingSlack) ? 0 : 1;
            }
        }
    }
    return {failures == 0, fmt("%zu orderings checked, %zu violated", checks, failures)};
}

Outcome criterion_6() {
    struct Case {
        SignalKind kind;
        HyperParams gamma;
    };
    const Case cases[] = {{SignalKind::ShellDense, {1.0, 2.0, 2.0, 0.5}},
                          {SignalKind::ShellSparse, {0.75, 1.0, 1.0, 0.5}},
                          {SignalKind::Zero, {1.0, 2.0, 2.0, 0.5}}};
    McOptions opts;
    opts.replicates = kOracleReplicates;
    opts.seed = 6;
    opts.threads = worker_threads();
    double worst = 0.0;
    std::size_t checks = 0;
    for (const auto& c : cases) {
        PenaltyConfig cfg;
        cfg.beta = c.gamma.beta;
        for (int e : {6, 8, 10}) {
            const double eps = std::exp2(-e);
            SignalSpec spec;
            spec.kind = c.kind;
            spec.gamma = c.gamma;
            spec.epsilon = eps;
            spec.jmax = default_jmax(c.gamma, 1.0, eps, spec.j0);
            const auto check = oracle_inequality_check(spec, cfg, NoiseSpec::white(eps, c.gamma.beta), opts);
            worst = std::max(worst, check.ratio);
            ++checks;
        }
    }
    return {worst <= kOracleRatioMax,
            fmt("%zu checks x %d replicates, D = %.0f, max lhs/rhs %.4f", checks, kOracleReplicates,
                oracle_constant(2.0), worst)};
}

struct RateRun {
    RateFit fit;
    double relative_error;
    double max_relative_stderr;  ///< max over eps of stderr / mean SSE; 0 when the SSE is deterministic
    int deepest;
};

RateRun rate_recovery(const ExperimentConfig& cfg, double r_target) {
    McOptions opts;
    opts.replicates = cfg.replicates;
    opts.seed = cfg.seed;
    opts.threads = worker_threads();
    std::vector<std::pair<double, double>> points;
    RateRun run{};
    for (double eps : cfg.epsilons) {
        const auto spec = cfg.signal_spec(eps);
        run.deepest = std::max(run.deepest, spec.jmax);
        const auto result = mc_risk(spec, cfg.penalty, cfg.noise(eps), opts);
        run.max_relative_stderr = std::max(run.max_relative_stderr, result.stderr_sse / result.mean_sse);
        const double divisor = cfg.uses_log_correction() ? std::pow(1.0 + std::log(cfg.radius / eps), r_target) : 1.0;
        points.emplace_back(eps, result.mean_sse / divisor);
    }
    run.fit = fit_rate_exponent(points);
    run.relative_error = relative_error(run.fit.r_hat, r_target);
    return run;
}

std::string describe(const char* label, const RateRun& run, double r_target) {
    return fmt("%s: r_hat %.4f vs r %.4f, rel err %.3f, max stderr/mean %.1e, jmax <= %d", label, run.fit.r_hat,
               r_target, run.relative_error, run.max_relative_stderr, run.deepest);
}

std::vector<double> rate_grid() {
    std::vector<double> eps;
    for (int e = 6; e <= 12; ++e) eps.push_back(std::exp2(-e));
    return eps;
}

Outcome criterion_7() {
    ExperimentConfig cfg;
    cfg.gamma = {1.0, 2.0, 2.0, 0.5};
    cfg.penalty.beta = cfg.gamma.beta;
    cfg.epsilons = rate_grid();
    cfg.replicates = kRateReplicates;
    cfg.seed = 7;
    // shell_dense sits below the threshold, so its SSE is the deterministic
    // bias ||theta||^2; besov_spread also exercises the kept coordinates.
    cfg.signal = SignalKind::ShellDense;
    cfg.validate();
    const auto shell = rate_recovery(cfg, 0.5);
    cfg.signal = SignalKind::BesovSpread;
    const auto spread = rate_recovery(cfg, 0.5);
    const bool pass = shell.relative_error <= kDenseRateRelTol && spread.relative_error <= kDenseRateRelTol;
    return {pass, describe("shell_dense", shell, 0.5) + "; " + describe("besov_spread", spread, 0.5) +
                      fmt("; tol %.2f, %d replicates", kDenseRateRelTol, kRateReplicates)};
}

Outcome criterion_8() {
    ExperimentConfig cfg;
    cfg.gamma = {0.75, 1.0, 1.0, 0.5};
    cfg.penalty.beta = cfg.gamma.beta;
    cfg.signal = SignalKind::ShellSparse;
    cfg.epsilons = rate_grid();
    cfg.replicates = kRateReplicates;
    cfg.seed = 8;
    cfg.log_correction = true;
    cfg.validate();
    // (alpha - 1/p + 1/2) / (alpha + beta - 1/p + 1/2) = 0.25 / 0.75.
    const double r = rate_exponent(cfg.gamma);
    const auto run = rate_recovery(cfg, r);
    return {run.relative_error <= kSparseRateRelTol,
            describe("shell_sparse", run, r) + fmt("; tol %.2f, %d replicates", kSparseRateRelTol, kRateReplicates)};
}

Outcome criterion_9() {
    std::string detail;
    bool pass = true;
    for (double beta : {0.0, 0.5, 1.0}) {
        PenaltyConfig cfg;
        cfg.beta = beta;
        double previous = INFINITY;
        double first = 0.0;
        double last = 0.0;
        for (int e = 4; e <= 20; ++e) {
            const double eps = std::exp2(-e);
            const double scaled = complexity_term(cfg, eps) / (eps * eps * std::log2(1.0 / (eps * eps)));
            pass = pass && scaled <= previous && scaled <= kComplexityScaledBound;
            if (e == 4) first = scaled;
            last = scaled;
            previous = scaled;
        }
        detail += fmt("beta=%.1f: %.3e -> %.3e; ", beta, first, last);
    }
    detail += fmt("bound %.2f", kComplexityScaledBound);
    return {pass, detail};
}

Outcome criterion_10() {
    double worst = 0.0;
    double worst_ratio = 0.0;
    for (double beta : {0.0, 0.5, 1.0}) {
        for (double p : {0.5, 1.0, 1.5}) {
            const double boundary = (2.0 * beta + 1.0) * (1.0 / p - 0.5);
            if (!(boundary + beta - kBoundaryDistance > 1.0 / p)) continue;
            for (double side : {1.0, -1.0}) {
                const double gap =
                    std::abs(rate_exponent({boundary + side * kBoundaryDistance, p, 2.0, beta}) - (1.0 - p / 2.0));
                worst = std::max(worst, gap);
                worst_ratio = std::max(worst_ratio, gap / kBoundaryDistance);
            }
        }
    }
    return {worst <= kBoundaryTol,
            fmt("max |r - (1 - p/2)| = %.3e at distance %.0e (tol %.0e); gap/distance <= %.3f, so the "
                "approach is linear in the distance",
                worst, kBoundaryDistance, kBoundaryTol, worst_ratio)};
}

const std::vector<std::function<Outcome()>> kCriteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8,
                                                         criterion_9, criterion_10};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(kCriteria.size()); ++i) selected.push_back(i);
    }
    bool all = true;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(kCriteria.size())) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = kCriteria[static_cast<std::size_t>(id - 1)]();
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %02d: %s  %s  [%.1f s]\n", id, outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(),
                    seconds);
        all = all && outcome.pass;
    }
    return all ? 0 : 1;
}
