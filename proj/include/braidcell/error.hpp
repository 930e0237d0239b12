#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace braidcell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A structural invariant does not hold. `invariant()` is a short stable
/// name such as "face self-neighbor" or "double adjacency".
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

/// A move or operation was applied outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The edge chain of a curve system is not a boundary.
class NotNullHomologous : public Error {
 public:
  using Error::Error;
};

class MoveLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Trace replay produced a state that differs from the recorded one.
class ReplayDivergence : public Error {
 public:
  ReplayDivergence(std::size_t move_index, const std::string& detail)
      : Error("divergence at move " + std::to_string(move_index) + ": " +
              detail),
        index_(move_index) {}

  std::size_t move_index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace braidcell
