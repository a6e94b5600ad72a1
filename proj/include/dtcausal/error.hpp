#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problems with a graph: unknown nodes, cycles, bad flags.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Malformed or ill-typed conditional independence statement.
class StatementError : public Error {
 public:
  explicit StatementError(const std::string& what, std::size_t column = 0)
      : Error(what), column_(column) {}

  /// 1-based column into the statement text, 0 when not from text.
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class DerivationError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// A conditioning event needed by an identification formula has zero
/// probability in the observational regime.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Syntax or semantic error in a text document, with a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             std::vector<std::string> expected = {})
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// Tokens that would have been accepted; empty for semantic errors.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

}  // namespace dtc
