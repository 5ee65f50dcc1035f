#pragma once

#include "gdrift/measure.hpp"
#include "gdrift/simulate.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>

namespace gdrift::io {

using Json = nlohmann::ordered_json;

/// {"atoms": [{"at", "weight"}...], "density": [{"from", "to", "value"}...]}
Json measure_to_json(const DriftMeasure& nu);
DriftMeasure measure_from_json(const Json& j);

/// {"type": "constant", "value"}
/// {"type": "table", "breakpoints": [...], "values": [...], "points": [{"at", "value"}...]}
/// {"type": "indicator_positive"}
Json coefficient_to_json(const Coefficient& b);
Coefficient coefficient_from_json(const Json& j);

/// {"measure", "convention", "x0", "b"}; "b" defaults to the constant 1 and
/// "x0" to 0.
Json spec_to_json(const SdeSpec& spec);
SdeSpec spec_from_json(const Json& j);

/// Parses JSON text; malformed input throws Error(ConfigError).
Json parse_json(const std::string& text);
Json read_json_file(const std::string& file);
void write_text_file(const std::string& file, const std::string& text);

/// First line of every CSV this tool writes.
std::string csv_config_header(const Json& config);

/// Rows (path_index, t, x) for each path, with path indices starting at first_index.
void write_paths_csv(std::ostream& out, std::span<const Path> paths, std::size_t first_index = 0,
                     bool column_header = true);

/// Reads one path from a (path_index, t, x) CSV. Lines starting with '#' and the
/// column header are skipped. dt is taken from the first two time stamps.
/// Throws Error(ConfigError) on malformed rows and Error(InsufficientPathData)
/// when the path has fewer than two points.
Path read_path_csv(std::istream& in, std::size_t path_index);

}  // namespace gdrift::io
