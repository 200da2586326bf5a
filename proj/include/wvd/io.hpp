#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvd/estimator.hpp"
#include "wvd/model.hpp"
#include "wvd/rates.hpp"
#include "wvd/simulate.hpp"

namespace wvd {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// {"j0": int, "levels": [[...], ...]}
[[nodiscard]] json sequence_to_json(const MultiresSequence& theta);
/// Throws ValidationError on a malformed document or level length mismatch.
[[nodiscard]] MultiresSequence sequence_from_json(const json& doc);

[[nodiscard]] json fit_to_json(const MultiscaleFit& fit);
[[nodiscard]] json rate_report_to_json(const RateReport& report);
[[nodiscard]] json profile_to_json(const ShellRiskProfile& profile);
/// Columns j, R_j, zone_label.
[[nodiscard]] std::string profile_to_csv(const ShellRiskProfile& profile);
[[nodiscard]] json mc_result_to_json(const McResult& result);
/// Columns epsilon, mean_sse, stderr, replicates; rows sorted by epsilon.
[[nodiscard]] std::string sweep_to_csv(std::vector<McResult> results);

/// JSON number, or null for non-finite values.
[[nodiscard]] json number_or_null(double value);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace wvd
