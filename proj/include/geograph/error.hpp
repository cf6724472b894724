#pragma once

#include <stdexcept>
#include <string>

namespace geograph {

// Contract violation caused by caller input (bad arguments, malformed data).
// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file content. `line` is 1-based when the format is line oriented,
// 0 otherwise.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

class UnsupportedShapeType : public ParseError {
 public:
  explicit UnsupportedShapeType(int code)
      : ParseError("unsupported shape type " + std::to_string(code)),
        code_(code) {}

  int code() const noexcept { return code_; }

 private:
  int code_;
};

// A library invariant broke. Never caused by user input; CLI exit code 2.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace geograph
