#ifndef JTMAT_ERRORS_HPP
#define JTMAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jtmat {

// Raised when an input document (BIF, native format, query file) is malformed.
// Line/column are 1-based; column 0 means "whole line".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column = 0)
      : std::runtime_error("parse error at line " + std::to_string(line) +
                           (column > 0 ? ":" + std::to_string(column) : "") +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when an internal invariant is violated. Indicates a bug in this
// library, not bad user input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& message)
      : std::logic_error("internal error: " + message) {}
};

}  // namespace jtmat

#endif  // JTMAT_ERRORS_HPP
