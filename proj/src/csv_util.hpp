#pragma once

// Minimal CSV field handling shared by the calibration and sample-block readers.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rssidoa/error.hpp"

namespace rssidoa::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

[[noreturn]] inline void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

inline double parse_double(std::string_view field, std::size_t line_no, const char* name) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    parse_fail(line_no, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

inline std::size_t parse_index(std::string_view field, std::size_t line_no, const char* name) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    parse_fail(line_no, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

/// True when the line is blank after trimming.
inline bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace rssidoa::detail
