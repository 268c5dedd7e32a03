#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bmc::io {

//! Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

//! Splits one CSV line on commas. No quoting support; none of our files need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

//! Writes `content` to `path` via a sibling temporary file and rename, so a
//! failed run never leaves a partial file behind.
void atomic_write_file(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

} // namespace bmc::io
