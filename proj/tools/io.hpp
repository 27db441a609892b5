#pragma once

#include <string>
#include <vector>

#include "armamle/core.hpp"
#include "json.hpp"

namespace armamle::cli {

/// Malformed user input (bad CSV, unknown parameter, bad flag values).
class InputError : public Error {
public:
    using Error::Error;
};

struct CsvSeries {
    std::vector<double> values;
    std::vector<bool> missing;
    std::string digest;  // SHA-256 of the raw file bytes, hex
};

/// One numeric column or `date,value` (last column used). Optional header;
/// lines starting with '#' are ignored; an empty cell or NA is missing.
CsvSeries parse_series_csv(const std::string& text);
CsvSeries read_series_csv(const std::string& path);
TimeSeries to_series(const CsvSeries& csv);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Comma-separated doubles ("0.5,-0.2"); empty text gives an empty list.
std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Manifest embedded in every output. Wall time lives under "timing".
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             std::uint64_t seed, const std::string& input_digest,
                             double wall_seconds);

/// `# manifest: {...}` line prefixed to CSV outputs.
std::string manifest_comment(const nlohmann::json& manifest);

const char* tool_version();

}  // namespace armamle::cli
