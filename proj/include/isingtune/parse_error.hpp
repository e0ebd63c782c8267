#pragma once

#include <stdexcept>
#include <string>

namespace isingtune {

/// Malformed input file. Carries the 1-based line number where parsing
/// stopped (0 when the position is not line-addressable).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error(line > 0
                               ? message + " (line " + std::to_string(line) +
                                     ")"
                               : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Structurally valid file using a feature this reader does not support.
class UnsupportedFormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace isingtune
