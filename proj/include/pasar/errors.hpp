#pragma once

#include <stdexcept>
#include <string>

namespace pasar {

// Base of every error the library raises. The C API maps each subclass to a
// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input files.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration (e.g. an MCS that cannot carry one parameter).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Protocol or controller state that violates its invariants.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace pasar
