#pragma once
// Small I/O helpers shared by the CSV writers and readers. All floating
// point output goes through format_fixed6 so CSV files are byte-stable.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qf {

// Fixed 6-decimal rendering; negative zero is normalized to "0.000000".
std::string format_fixed6(double v);

// Split on a delimiter with no quoting rules; ids in this project are plain
// tokens. Keeps empty fields.
std::vector<std::string> split_line(const std::string& line, char delim = ',');

bool parse_i64(const std::string& s, std::int64_t& out);
bool parse_double(const std::string& s, double& out);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// FNV-1a 64-bit, used for config/input fingerprints in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex64(std::uint64_t v);

}  // namespace qf
