#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace tbe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A mini-bucket bound `z` smaller than the arity of some function.
class BoundTooSmallError : public Error {
 public:
  BoundTooSmallError(std::size_t z, std::size_t arity)
      : Error("z = " + std::to_string(z) + " is below the arity " + std::to_string(arity) +
              " of a bucket member"),
        z_(z),
        arity_(arity) {}

  std::size_t z() const { return z_; }
  std::size_t arity() const { return arity_; }

 private:
  std::size_t z_;
  std::size_t arity_;
};

/// Raised before any table is materialized when the planned elimination
/// would not fit the configured row budget.
class MemoryBudgetError : public Error {
 public:
  MemoryBudgetError(std::uint32_t bucket_variable, std::size_t estimated_rows,
                    std::size_t budget_rows)
      : Error("memory budget exceeded in bucket of x" + std::to_string(bucket_variable) +
              ": needs " + rows_text(estimated_rows) + " rows, budget " +
              std::to_string(budget_rows)),
        variable_(bucket_variable),
        rows_(estimated_rows),
        budget_(budget_rows) {}

  std::uint32_t bucket_variable() const { return variable_; }
  /// SIZE_MAX when the count overflowed.
  std::size_t estimated_rows() const { return rows_; }
  std::size_t budget_rows() const { return budget_; }

 private:
  static std::string rows_text(std::size_t rows) {
    return rows == SIZE_MAX ? "more than " + std::to_string(SIZE_MAX) : std::to_string(rows);
  }

  std::uint32_t variable_;
  std::size_t rows_;
  std::size_t budget_;
};

class TimeoutError : public Error {
 public:
  TimeoutError() : Error("time limit reached") {}
};

/// Exhaustive enumeration refused because the state space is too large.
class StateSpaceTooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace tbe
