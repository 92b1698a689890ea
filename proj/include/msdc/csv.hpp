#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace msdc::csv {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_number(double v);

std::vector<std::string> split_row(std::string_view line);

/// Parses a numeric field; throws DataError mentioning `where` on failure.
double parse_number(std::string_view field, const std::string& where);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<int> line_numbers;
};

/// Header line followed by numeric rows. Blank lines are skipped.
Table read_numeric(std::istream& in, const std::string& source);

}  // namespace msdc::csv
