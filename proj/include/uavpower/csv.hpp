#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace uavpower::csv {

struct Row {
  std::size_t line = 0;  // 1-based line in the source
  std::vector<double> values;
  double operator[](std::size_t i) const { return values[i]; }
};

/// Reads a numeric CSV whose first line must equal `header` (columns
/// comma-separated, surrounding whitespace and a trailing CR ignored).
/// Blank lines are skipped. Throws ParseError with the offending line number.
std::vector<Row> read_numeric(std::istream& in, const std::string& source,
                                              const std::vector<std::string>& header);

/// Shortest decimal string that round-trips to the same double.
std::string repr(double x);

/// 12 significant digits.
std::string g12(double x);

}  // namespace uavpower::csv
