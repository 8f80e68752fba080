#include "qss/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace qss::csv {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf.data(), end};
}

double parse_double(std::string_view s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return x;
}

long long parse_int(std::string_view s) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return x;
}

unsigned long long parse_uint(std::string_view s) {
  unsigned long long x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
  }
  return x;
}

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void expect_header(std::string_view line, std::string_view expected) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line != expected) {
    throw std::invalid_argument("unexpected CSV header '" + std::string(line) + "', expected '" +
                                std::string(expected) + "'");
  }
}

}  // namespace qss::csv
