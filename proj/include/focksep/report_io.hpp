#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "focksep/errors.hpp"

namespace focksep::io {

// Shortest-exact double formatting at 17 significant digits; round-trips to
// the identical bit pattern and is byte-stable across runs.
std::string fmt17(double x);

// Deterministic JSON serialization: insertion-ordered keys (ordered_json),
// fmt17 for every floating-point number, fixed 2-space indentation.
std::string to_json_text(const nlohmann::ordered_json& doc);

void write_file(const std::filesystem::path& path, const std::string& bytes);

enum class EmitFormat { Json, Csv, Svg };

EmitFormat parse_format(const std::string& name);  // UnsupportedFormat

}  // namespace focksep::io
