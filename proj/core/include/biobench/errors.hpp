#pragma once

#include <stdexcept>
#include <string>

namespace biobench {

// Error taxonomy shared across the suite. The CLI maps ConfigError to
// exit code 2 and every other Error to exit 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violation on an operation's inputs.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Operation invoked before the state it depends on exists.
class StateError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, singular matrices, diverging iterations.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Asset table fails an integrity check; the message names the row.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad application configuration or unknown identifier.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Processing does not fit inside the acquisition window.
class RealTimeViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace biobench
