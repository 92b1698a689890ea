#include "msdc/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>

#include <fmt/format.h>

#include "msdc/error.hpp"

namespace msdc::csv {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, const std::string& where) {
  const std::string text(field);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || (errno == ERANGE && std::isinf(v))) {
    throw DataError(fmt::format("{}: expected a number, got '{}'", where, text));
  }
  return v;
}

Table read_numeric(std::istream& in, const std::string& source) {
  Table table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = split_row(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(fmt::format("{}:{}: expected {} fields, got {}", source, line_no,
                                  table.header.size(), fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, fmt::format("{}:{}", source, line_no)));
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw DataError(fmt::format("{}: empty file (no header)", source));
  return table;
}

}  // namespace msdc::csv
