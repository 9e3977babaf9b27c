#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cutph/em.hpp"
#include "cutph/gof.hpp"
#include "cutph/model.hpp"

namespace cutph {

using AnyModel = std::variant<ContinuousCutpointModel, DiscreteCutpointModel>;

// Model document: {"kind": "continuous"|"discrete", "alpha": [...],
// "matrices": [row-major 2-D arrays], "cutpoints": [...]}. Numbers round-trip
// losslessly at full double precision.
nlohmann::json to_json(const ContinuousCutpointModel& model);
nlohmann::json to_json(const DiscreteCutpointModel& model);
AnyModel model_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const FitResult& result);
FitResult fit_result_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const GofReport& report);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& doc);

// Single numeric column with header `value`; leading '#' lines are comments.
// Throws std::runtime_error naming the offending line on malformed input.
std::vector<double> read_value_csv(const std::string& path);

// Writes an optional '# ...' comment line, the `value` header, then one
// 17-significant-digit number per row, LF endings.
void write_value_csv(const std::string& path, std::span<const double> values,
                     const std::string& comment = "");

// 17 significant digits, '.' decimal separator.
std::string format_double(double value);

}  // namespace cutph
