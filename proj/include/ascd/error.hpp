#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ascd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, incompatible configuration or malformed input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-finite values or failed factorizations during a run.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ascd
