#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fockdom::cli {

inline constexpr int kSchemaVersion = 1;

/// Runs one command. `args` excludes the program name. Returns 0 when a
/// verdict was computed (negative verdicts included) and 2 on usage or
/// validation errors. The report goes to `out` unless --output is given.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Report with the timing block removed, for reproducibility comparisons.
nlohmann::json without_timings(nlohmann::json report);

/// One "path = value" line per leaf of a JSON document.
std::string pretty(const nlohmann::json& j);

} // namespace fockdom::cli
