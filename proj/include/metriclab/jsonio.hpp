#pragma once

#include <string>

#include <json.hpp>

namespace metriclab {

// Serialize a JSON tree with every floating-point number printed with 17
// significant digits (%.17g), field order preserved. All report output goes
// through this so runs are byte-deterministic.
std::string dump_json_17(const nlohmann::ordered_json& j, int indent = 2);

// printf("%.17g") as a std::string (shared by CSV and JSON emitters).
std::string fmt17(double v);

} // namespace metriclab
