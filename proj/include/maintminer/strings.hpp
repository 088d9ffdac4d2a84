#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace maintminer {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Splits on every occurrence of `sep`; keeps empty fields.
std::vector<std::string> split(std::string_view s, char sep);

/// Non-empty whitespace-separated tokens.
std::vector<std::string> split_whitespace(std::string_view s);

/// Lines of a text resource, trimmed, skipping blanks and `#` comments.
std::vector<std::string> resource_lines(std::string_view text);

/// FNV-1a 64.
std::uint64_t fnv1a64(std::string_view bytes);
/// fnv1a64 as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// UTC date "YYYY-MM-DD" for a unix timestamp.
std::string iso_date(long long unix_seconds);

/// Parses "YYYY-MM-DD" (or a plain integer of unix seconds) as UTC midnight.
long long parse_date(std::string_view text);

}  // namespace maintminer
