#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cgame {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace cgame
