#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emospread {

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

/// Shortest round-trip decimal representation; identical bits give identical text.
std::string format_double(double value);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string &path);

std::string read_file(const std::string &path);
/// Writes atomically enough for our purposes: truncates and writes in one go.
void write_file(const std::string &path, std::string_view contents);

} // namespace emospread
