#pragma once

#include <stdexcept>
#include <string>

namespace tvha {

// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands disagree on qubit count / vector length.
struct DimensionError : Error {
  using Error::Error;
};

// Argument outside its mathematical domain (p not in [0,1], negative shots, ...).
struct DomainError : Error {
  using Error::Error;
};

// Malformed input text. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_no = 0)
      : Error(line_no ? what + " (line " + std::to_string(line_no) + ")" : what),
        line(line_no) {}
  std::size_t line;
};

// Structurally valid input that violates a semantic constraint.
struct ValidationError : Error {
  using Error::Error;
};

// A term group does not satisfy the commutation mode an operation requires.
struct InvalidGroupError : Error {
  using Error::Error;
};

// Request exceeds a hard resource bound (dense diagonalization cap, ...).
struct CapacityError : Error {
  using Error::Error;
};

// Inconsistent or incomplete run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace tvha
