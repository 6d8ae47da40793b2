#pragma once

// Small CSV helpers shared by the text file readers.

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "geosep/error.hpp"

namespace geosep::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Splits on '\n', dropping a trailing empty line and '\r' terminators.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::ParseError,
                where(line_no) + "cannot parse " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace geosep::csv
