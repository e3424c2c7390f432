#pragma once

#include <stdexcept>
#include <string>

namespace ftevolve {

// Bad arguments, malformed data, or preconditions the caller violated.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation would exceed a hard resource cap (clause blow-up,
// truth-table enumeration over too many variables, ...).
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Text input that does not conform to the expected format.  Positions are
// 1-based; a value of 0 means "not tied to a specific position".
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, int line, int column)
      : std::runtime_error(make_what(what, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string make_what(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace ftevolve
