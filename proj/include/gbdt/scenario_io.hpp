#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gbdt/scenario.hpp"

namespace gbdt::io {

using json = nlohmann::json;

inline constexpr const char* kToolName = "gbdt";
inline constexpr const char* kToolVersion = "0.1.0";

/// Matrices are lists of rows; an entry is a real number or a [re, im] pair.
ComplexMatrix matrix_from_json(const json& value, const std::string& field);
json matrix_to_json(const ComplexMatrix& m);

Scenario scenario_from_json(const json& doc);
json scenario_to_json(const Scenario& scenario);

/// Reads a scenario file and, unless `validate` is false, fully validates it.
/// Throws Error{Parse} with the offending field (or line/column for malformed
/// text), or the validation error of the violated condition.
Scenario parse_scenario(const std::filesystem::path& path, bool validate = true);

/// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string scenario_digest(const Scenario& scenario);

json report_to_json(const VerificationReport& report);

/// Writes through a temporary file in the same directory, then renames.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

} // namespace gbdt::io
