#pragma once

#include <stdexcept>
#include <string>

namespace jointsem {

/// Input that violates a documented contract (bad file, unknown LU, bad flag).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A located failure while reading a text or binary format.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, long line, const std::string& what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace jointsem
