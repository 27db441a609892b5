#include "io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef ARMAMLE_VERSION
#define ARMAMLE_VERSION "0.0.0"
#endif

namespace armamle::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA" || s == "na" || s == "NaN"; }

}  // namespace

CsvSeries parse_series_csv(const std::string& text) {
    CsvSeries out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool first_data_line = true;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() > 2) {
            throw InputError("line " + std::to_string(lineno) + ": expected one column or date,value");
        }
        const std::string& cell = cells.back();
        double v = 0.0;
        const bool numeric = parse_double(cell, v);
        if (first_data_line) {
            first_data_line = false;
            columns = cells.size();
            if (!numeric && !is_missing_token(cell)) continue;  // header
        } else if (cells.size() != columns) {
            throw InputError("line " + std::to_string(lineno) + ": inconsistent column count");
        }
        if (numeric) {
            out.values.push_back(v);
            out.missing.push_back(false);
        } else if (is_missing_token(cell)) {
            out.values.push_back(std::nan(""));
            out.missing.push_back(true);
        } else {
            throw InputError("line " + std::to_string(lineno) + ": cannot parse '" + cell + "' as a number");
        }
    }
    if (out.values.empty()) throw InputError("no observations in input");
    if (std::all_of(out.missing.begin(), out.missing.end(), [](bool m) { return m; })) {
        throw InputError("every observation is missing");
    }
    out.digest = sha256_hex(text);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw InputError("write failed for '" + path + "'");
}

CsvSeries read_series_csv(const std::string& path) { return parse_series_csv(read_file(path)); }

TimeSeries to_series(const CsvSeries& csv) {
    try {
        return TimeSeries(csv.values, csv.missing);
    } catch (const InvalidSeriesError& e) {
        throw InputError(e.what());
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        double v = 0.0;
        if (!parse_double(trim(item), v)) throw InputError("cannot parse '" + item + "' as a number");
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) {
        if (v != std::floor(v)) throw InputError("expected an integer list: '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             std::uint64_t seed, const std::string& input_digest,
                             double wall_seconds) {
    nlohmann::json m{{"command", command},
                     {"config", config},
                     {"seed", seed},
                     {"tool_version", tool_version()},
                     {"timing", {{"wall_seconds", wall_seconds}}}};
    m["input_digest"] = input_digest.empty() ? nlohmann::json(nullptr) : nlohmann::json(input_digest);
    return m;
}

std::string manifest_comment(const nlohmann::json& manifest) {
    return "# manifest: " + manifest.dump() + "\n";
}

const char* tool_version() { return ARMAMLE_VERSION; }

}  // namespace armamle::cli
