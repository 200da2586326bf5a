#include "wvd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "wvd/errors.hpp"
#include "wvd/rates.hpp"

namespace wvd {

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ValidationError("config: \"" + where + "\" must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.contains(key)) throw ValidationError("config: unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
    if (!obj.contains(key) || obj[key].is_null()) return;
    try {
        target = obj[key].get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config: field \"") + key + "\" has the wrong type");
    }
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& target) {
    if (!obj.contains(key) || obj[key].is_null()) return;
    T value{};
    read(obj, key, value);
    target = value;
}

std::string covariance_name(CovarianceKind kind) {
    return kind == CovarianceKind::Identity ? "identity" : "tridiagonal";
}

CovarianceKind covariance_from_string(const std::string& name) {
    if (name == "identity") return CovarianceKind::Identity;
    if (name == "tridiagonal") return CovarianceKind::Tridiagonal;
    throw ValidationError("config: unknown covariance \"" + name + "\"");
}

}  // namespace

NoiseSpec ExperimentConfig::noise(double epsilon) const {
    return covariance == CovarianceKind::Identity ? NoiseSpec::white(epsilon, gamma.beta)
                                                  : NoiseSpec::tridiagonal(epsilon, gamma.beta, rho);
}

SignalSpec ExperimentConfig::signal_spec(double epsilon) const {
    SignalSpec spec;
    spec.kind = signal;
    spec.gamma = gamma;
    spec.radius = radius;
    spec.epsilon = epsilon;
    spec.j0 = j0;
    spec.jmax = jmax_for(epsilon);
    spec.placement = placement;
    spec.rho1 = rho1;
    spec.rho2 = rho2;
    spec.xi0 = noise(epsilon).xi0;
    return spec;
}

int ExperimentConfig::jmax_for(double epsilon) const {
    if (jmax) return *jmax;
    int level = default_jmax(gamma, radius, epsilon, j0);
    if (signal == SignalKind::CriticalPrior) {
        const int top = static_cast<int>(std::ceil(rho2 * j_star(gamma, radius, epsilon)));
        level = std::clamp(std::max(level, top), j0, 20);
    }
    return level;
}

bool ExperimentConfig::uses_log_correction() const {
    return log_correction.value_or(classify_zone(gamma, zone) != Zone::Dense);
}

void ExperimentConfig::validate() const {
    gamma.validate();
    const Zone resolved = classify_zone(gamma, zone);
    if (resolved == Zone::Invalid) throw ValidationError("config: hyper-parameters fall in no valid zone");
    if (!std::isfinite(radius) || !(radius > 0.0)) throw ValidationError("config: radius must be positive");
    if (penalty.beta != gamma.beta) throw ValidationError("config: penalty beta must equal gamma beta");
    penalty.validate();
    if (covariance == CovarianceKind::Tridiagonal && !(std::abs(rho) < 0.5)) {
        throw ValidationError("config: tridiagonal covariance needs |rho| < 1/2");
    }
    if (covariance == CovarianceKind::Identity && rho != 0.0) {
        throw ValidationError("config: rho is only meaningful with the tridiagonal covariance");
    }
    if (epsilons.empty()) throw ValidationError("config: epsilon grid is empty");
    for (double eps : epsilons) {
        if (!std::isfinite(eps) || !(eps > 0.0) || !(eps < radius) || !(eps < 1.0)) {
            std::ostringstream msg;
            msg << "config: epsilon " << eps << " must lie in (0, min(C, 1))";
            throw ValidationError(msg.str());
        }
    }
    if (replicates < 2) throw ValidationError("config: replicates must be >= 2");
    if (threads < 1) throw ValidationError("config: threads must be >= 1");
    if (j0 < 0) throw ValidationError("config: j0 must be >= 0");
    if (jmax && (*jmax < j0 || *jmax > 24)) throw ValidationError("config: jmax must lie in [j0, 24]");
    if (signal == SignalKind::ShellSparse && !(gamma.p < 2.0)) {
        throw ConfigurationError("config: shell_sparse signal requires p < 2");
    }
    if (signal == SignalKind::CriticalPrior && resolved != Zone::Critical) {
        throw ConfigurationError("config: critical_prior signal requires the Critical zone");
    }
    const NoiseSpec probe = noise(epsilons.front());
    probe.validate();
    if (penalty.xi1 < probe.xi1 * (1.0 - 1e-12)) {
        throw ValidationError("config: penalty xi1 is below the noise covariance bound");
    }
    if (rate_tolerance && !(*rate_tolerance > 0.0)) throw ValidationError("config: rate_tolerance must be > 0");
    if (equivalence.n_max < 1 || equivalence.n_max > kSubsetOracleMaxSize) {
        throw ValidationError("config: equivalence n_max must lie in [1, 20]");
    }
}

ExperimentConfig experiment_from_json(const json& doc) {
    reject_unknown(doc, "config",
                   {"gamma", "zone", "radius", "penalty", "noise", "signal", "epsilons", "replicates", "seed",
                    "threads", "j0", "jmax", "first_penalized_level", "log_correction", "rate_tolerance",
                    "equivalence", "schema_version", "jmax_resolved"});
    ExperimentConfig cfg;
    if (doc.contains("gamma")) {
        const auto& g = doc["gamma"];
        reject_unknown(g, "gamma", {"alpha", "p", "q", "beta"});
        read(g, "alpha", cfg.gamma.alpha);
        read(g, "p", cfg.gamma.p);
        read(g, "q", cfg.gamma.q);
        read(g, "beta", cfg.gamma.beta);
    }
    if (doc.contains("zone") && !doc["zone"].is_null()) {
        std::string name;
        read(doc, "zone", name);
        cfg.zone = zone_from_string(name);
    }
    read(doc, "radius", cfg.radius);

    if (doc.contains("noise")) {
        const auto& n = doc["noise"];
        reject_unknown(n, "noise", {"covariance", "rho"});
        std::string kind = covariance_name(cfg.covariance);
        read(n, "covariance", kind);
        cfg.covariance = covariance_from_string(kind);
        read(n, "rho", cfg.rho);
    }

    cfg.penalty.beta = cfg.gamma.beta;
    if (doc.contains("penalty")) {
        const auto& p = doc["penalty"];
        reject_unknown(p, "penalty", {"zeta", "nu", "xi1", "jeps_scale", "beta"});
        read(p, "zeta", cfg.penalty.zeta);
        read(p, "nu", cfg.penalty.nu);
        read(p, "jeps_scale", cfg.penalty.jeps_scale);
        read(p, "beta", cfg.penalty.beta);
        if (p.contains("xi1") && !p["xi1"].is_null()) {
            read(p, "xi1", cfg.penalty.xi1);
            cfg.penalty_xi1_set = true;
        }
    }
    if (!cfg.penalty_xi1_set) cfg.penalty.xi1 = 1.0 + 2.0 * std::abs(cfg.rho);

    if (doc.contains("signal")) {
        const auto& s = doc["signal"];
        reject_unknown(s, "signal", {"kind", "placement", "rho1", "rho2"});
        std::string kind(to_string(cfg.signal));
        read(s, "kind", kind);
        cfg.signal = signal_kind_from_string(kind);
        std::string placement(to_string(cfg.placement));
        read(s, "placement", placement);
        cfg.placement = placement_from_string(placement);
        read(s, "rho1", cfg.rho1);
        read(s, "rho2", cfg.rho2);
    }

    read(doc, "epsilons", cfg.epsilons);
    read(doc, "replicates", cfg.replicates);
    read(doc, "seed", cfg.seed);
    read(doc, "threads", cfg.threads);
    read(doc, "j0", cfg.j0);
    read(doc, "jmax", cfg.jmax);
    read(doc, "first_penalized_level", cfg.first_penalized_level);
    read(doc, "log_correction", cfg.log_correction);
    read(doc, "rate_tolerance", cfg.rate_tolerance);

    cfg.equivalence.seed = cfg.seed;
    if (doc.contains("equivalence")) {
        const auto& e = doc["equivalence"];
        reject_unknown(e, "equivalence", {"instances_per_n", "n_max", "betas"});
        read(e, "instances_per_n", cfg.equivalence.instances_per_n);
        read(e, "n_max", cfg.equivalence.n_max);
        read(e, "betas", cfg.equivalence.betas);
    }
    cfg.validate();
    return cfg;
}

json experiment_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["gamma"] = {{"alpha", cfg.gamma.alpha}, {"p", cfg.gamma.p}, {"q", cfg.gamma.q}, {"beta", cfg.gamma.beta}};
    doc["zone"] = std::string(to_string(classify_zone(cfg.gamma, cfg.zone)));
    doc["radius"] = cfg.radius;
    doc["penalty"] = {{"zeta", cfg.penalty.zeta},
                      {"nu", cfg.penalty.nu},
                      {"xi1", cfg.penalty.xi1},
                      {"jeps_scale", cfg.penalty.jeps_scale},
                      {"beta", cfg.penalty.beta}};
    doc["noise"] = {{"covariance", covariance_name(cfg.covariance)}, {"rho", cfg.rho}};
    doc["signal"] = {{"kind", std::string(to_string(cfg.signal))},
                     {"placement", std::string(to_string(cfg.placement))},
                     {"rho1", cfg.rho1},
                     {"rho2", cfg.rho2}};
    doc["epsilons"] = cfg.epsilons;
    doc["replicates"] = cfg.replicates;
    doc["seed"] = cfg.seed;
    doc["threads"] = cfg.threads;
    doc["j0"] = cfg.j0;
    json levels = json::array();
    for (double eps : cfg.epsilons) levels.push_back(cfg.jmax_for(eps));
    doc["jmax"] = cfg.jmax ? json(*cfg.jmax) : json(nullptr);
    doc["jmax_resolved"] = levels;
    doc["first_penalized_level"] = cfg.first_penalized_level ? json(*cfg.first_penalized_level) : json(nullptr);
    doc["log_correction"] = cfg.uses_log_correction();
    doc["rate_tolerance"] = cfg.rate_tolerance ? json(*cfg.rate_tolerance) : json(nullptr);
    doc["equivalence"] = {{"instances_per_n", cfg.equivalence.instances_per_n},
                          {"n_max", cfg.equivalence.n_max},
                          {"betas", cfg.equivalence.betas}};
    return doc;
}

}  // namespace wvd
