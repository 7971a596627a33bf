#include "uavpower/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "uavpower/errors.hpp"

namespace uavpower::csv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

}  // namespace

std::vector<Row> read_numeric(std::istream& in, const std::string& source,
                                              const std::vector<std::string>& header) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    if (!have_header) {
      if (cells != header) {
        throw ParseError(source, line_no, "expected header '" + join(header) + "'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& c = cells[i];
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec != std::errc() || ptr != c.data() + c.size() || c.empty()) {
        throw ParseError(source, line_no, "column '" + header[i] + "': not a number: '" + c + "'");
      }
    }
    rows.push_back({line_no, std::move(row)});
  }
  if (!have_header) {
    throw ParseError(source, line_no, "missing header '" + join(header) + "'");
  }
  return rows;
}

std::string repr(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace uavpower::csv
