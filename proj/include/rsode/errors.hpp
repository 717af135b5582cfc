#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rsode {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column,
             std::vector<std::string> expected);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Evaluation outside the domain of an expression: log of a nonpositive
/// real, division by zero, Taylor expansion at a pole or branch point.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input rejected by a validation step (metric family checks, admissibility,
/// preconditions of the reduction operations).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Integration or linear algebra failure: step-size underflow, singular solve.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& message, double last_time = 0.0)
      : Error(message), last_time_(last_time) {}
  /// Last time reached before the failure (integrators only).
  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

}  // namespace rsode
