#include "wvd/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wvd/errors.hpp"

namespace wvd {

namespace {

std::string format_number(double value) {
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

}  // namespace

json number_or_null(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

json sequence_to_json(const MultiresSequence& theta) {
    json doc;
    doc["j0"] = theta.j0();
    doc["levels"] = theta.levels();
    return doc;
}

MultiresSequence sequence_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("sequence: expected a JSON object with \"j0\" and \"levels\"");
    if (!doc.contains("j0") || !doc["j0"].is_number_integer()) {
        throw ValidationError("sequence: \"j0\" must be an integer");
    }
    if (!doc.contains("levels") || !doc["levels"].is_array()) {
        throw ValidationError("sequence: \"levels\" must be an array of arrays");
    }
    std::vector<std::vector<double>> levels;
    for (const auto& level : doc["levels"]) {
        if (!level.is_array()) throw ValidationError("sequence: every level must be an array of numbers");
        std::vector<double> values;
        values.reserve(level.size());
        for (const auto& v : level) {
            if (!v.is_number()) throw ValidationError("sequence: level entries must be numbers");
            values.push_back(v.get<double>());
        }
        levels.push_back(std::move(values));
    }
    return MultiresSequence(doc["j0"].get<int>(), std::move(levels));
}

json fit_to_json(const MultiscaleFit& fit) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["first_penalized_level"] = fit.first_penalized_level;
    json levels = json::array();
    for (std::size_t i = 0; i < fit.levels.size(); ++i) {
        const auto& level = fit.levels[i];
        json entry;
        entry["j"] = fit.estimate.j0() + static_cast<int>(i);
        entry["passthrough"] = fit.is_passthrough(entry["j"].get<int>());
        entry["k_hat"] = level.k_hat;
        entry["threshold"] = number_or_null(level.threshold);
        entry["objective"] = level.objective;
        entry["nu_eff"] = number_or_null(fit.nu_eff[i]);
        entry["noise_scale"] = fit.level_noise[i];
        levels.push_back(std::move(entry));
    }
    doc["levels"] = std::move(levels);
    doc["estimate"] = sequence_to_json(fit.estimate);
    return doc;
}

json rate_report_to_json(const RateReport& report) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["gamma"] = {{"alpha", report.gamma.alpha},
                    {"p", report.gamma.p},
                    {"q", report.gamma.q},
                    {"beta", report.gamma.beta}};
    doc["C"] = report.radius;
    doc["epsilon"] = report.epsilon;
    doc["zone"] = std::string(to_string(report.zone));
    doc["r"] = report.r;
    doc["rate_value"] = report.rate_value;
    doc["j_star"] = report.j_star;
    doc["j_plus"] = number_or_null(report.j_plus);
    doc["R_star"] = report.R_star;
    doc["R_plus"] = number_or_null(report.R_plus);
    return doc;
}

json profile_to_json(const ShellRiskProfile& profile) {
    json rows = json::array();
    for (std::size_t i = 0; i < profile.j.size(); ++i) {
        rows.push_back({{"j", profile.j[i]},
                        {"R_j", profile.risk[i]},
                        {"zone_label", std::string(to_string(profile.branch[i]))}});
    }
    return rows;
}

std::string profile_to_csv(const ShellRiskProfile& profile) {
    std::ostringstream out;
    out << "j,R_j,zone_label\n";
    for (std::size_t i = 0; i < profile.j.size(); ++i) {
        out << format_number(profile.j[i]) << ',' << format_number(profile.risk[i]) << ','
            << to_string(profile.branch[i]) << '\n';
    }
    return out.str();
}

json mc_result_to_json(const McResult& result) {
    json doc;
    doc["epsilon"] = result.epsilon;
    doc["replicates"] = result.replicates;
    doc["mean_sse"] = result.mean_sse;
    doc["stderr"] = result.stderr_sse;
    doc["j0"] = result.j0;
    doc["per_level_sse"] = result.per_level_sse;
    return doc;
}

std::string sweep_to_csv(std::vector<McResult> results) {
    std::ranges::stable_sort(results, {}, &McResult::epsilon);
    std::ostringstream out;
    out << "epsilon,mean_sse,stderr,replicates\n";
    for (const auto& r : results) {
        out << format_number(r.epsilon) << ',' << format_number(r.mean_sse) << ',' << format_number(r.stderr_sse)
            << ',' << r.replicates << '\n';
    }
    return out.str();
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace wvd
