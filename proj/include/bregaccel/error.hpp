#pragma once

#include <stdexcept>
#include <string>

namespace bregaccel {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands whose sizes must agree do not.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& first, const std::string& second, const std::string& detail)
      : Error("dimension mismatch between " + first + " and " + second + ": " + detail),
        first_(first),
        second_(second) {}

  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

/// Problem data violates a structural requirement (symmetry, definiteness, sign).
class InvalidProblemError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared, or an iteration broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Backtracking exhausted its trial budget without sufficient decrease.
class LineSearchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No point satisfies the linear constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class InputError : public Error {
 public:
  InputError(const std::string& where, std::size_t line, const std::string& what)
      : Error(where + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bregaccel
