#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace maintminer::csv {

using Row = std::vector<std::string>;

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// `line_numbers` receives the 1-based physical line each record started on.
std::vector<Row> parse(std::string_view text, std::vector<std::size_t>* line_numbers = nullptr);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string format_row(const Row& row);

}  // namespace maintminer::csv
