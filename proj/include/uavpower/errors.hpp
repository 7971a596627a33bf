#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uavpower {

// A speed or thrust outside the region where a model is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Physical or combined parameters violating their invariants.
class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Measured data that cannot be used: too few points, non-finite values,
// unsorted timestamps.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace uavpower
