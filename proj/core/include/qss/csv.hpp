#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qss::csv {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
unsigned long long parse_uint(std::string_view s);

/// Splits one line on commas; no quoting (none of our fields need it).
std::vector<std::string> split(std::string_view line);

/// Reads the header row and checks it matches `expected` exactly.
void expect_header(std::string_view line, std::string_view expected);

}  // namespace qss::csv
