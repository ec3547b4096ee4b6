#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace khash {

/// Evaluation at or past the pole (k^2 - 2k) * gamma = 1 of the closed-form
/// stationary point.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A combinatorial enumeration would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer, root finder, or bound sanity check did not produce a usable
/// number.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Hansel-type inequality was requested on a code whose separation premise
/// does not hold.
class NotSeparated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace khash
