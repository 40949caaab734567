#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modcut {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure inside the linear programming backend or the search engine.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace modcut
