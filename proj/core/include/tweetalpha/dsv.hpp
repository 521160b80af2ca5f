#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tweetalpha {

/// Splits one delimiter-separated record. Double-quoted fields may contain
/// the delimiter and "" escapes; records never span lines.
std::vector<std::string> split_dsv(std::string_view line, char delimiter);

/// Quotes a field for writing when it contains the delimiter, a quote, or
/// leading/trailing whitespace.
std::string dsv_escape(std::string_view field, char delimiter);

/// Header normalization: trims whitespace, strips one layer of angle-bracket
/// decoration ("<OPEN>" -> "open"), lowercases ASCII.
std::string normalize_header_name(std::string_view name);

/// getline with trailing '\r' removed. Returns false on EOF.
bool read_line(std::istream& in, std::string& line);

/// Strict integer field: optional sign, digits, nothing else.
std::int64_t parse_int64(std::string_view text);

/// Strict floating-point field; the whole text must be consumed.
double parse_double(std::string_view text);

}  // namespace tweetalpha
