#include "tweetalpha/dsv.hpp"

#include <cctype>
#include <cstdlib>
#include <istream>

#include "tweetalpha/error.hpp"

namespace tweetalpha {

std::vector<std::string> split_dsv(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  std::size_t i = 0;
  bool field_started_quoted = false;

  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      current.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && current.empty() && !field_started_quoted) {
      in_quotes = true;
      field_started_quoted = true;
      ++i;
      continue;
    }
    if (c == delimiter) {
      fields.push_back(std::move(current));
      current.clear();
      field_started_quoted = false;
      ++i;
      continue;
    }
    current.push_back(c);
    ++i;
  }
  if (in_quotes) {
    throw data_error("unterminated quoted field in record: \"" + std::string(line) + "\"");
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string dsv_escape(std::string_view field, char delimiter) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!field.empty() &&
      (std::isspace(static_cast<unsigned char>(field.front())) ||
       std::isspace(static_cast<unsigned char>(field.back())))) {
    needs_quotes = true;
  }
  if (!needs_quotes) return std::string(field);

  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string normalize_header_name(std::string_view name) {
  std::size_t b = 0;
  std::size_t e = name.size();
  while (b < e && std::isspace(static_cast<unsigned char>(name[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(name[e - 1]))) --e;
  std::string_view trimmed = name.substr(b, e - b);
  if (trimmed.size() >= 2 && trimmed.front() == '<' && trimmed.back() == '>') {
    trimmed = trimmed.substr(1, trimmed.size() - 2);
  }
  std::string out;
  out.reserve(trimmed.size());
  for (char c : trimmed) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::int64_t parse_int64(std::string_view text) {
  if (text.empty()) throw data_error("empty integer field");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw data_error("malformed integer: \"" + std::string(text) + "\"");
  std::int64_t value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw data_error("malformed integer: \"" + std::string(text) + "\"");
    }
    if (__builtin_mul_overflow(value, 10, &value) ||
        __builtin_add_overflow(value, text[i] - '0', &value)) {
      throw data_error("integer out of range: \"" + std::string(text) + "\"");
    }
  }
  return negative ? -value : value;
}

double parse_double(std::string_view text) {
  std::string buf(text);
  if (buf.empty()) throw data_error("empty numeric field");
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) {
    throw data_error("malformed number: \"" + buf + "\"");
  }
  return value;
}

}  // namespace tweetalpha
