#pragma once

#include <stdexcept>
#include <string>

namespace monosplit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes or call order was broken by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, overflow, or a linear system that should never be
/// singular for valid input.
class NumericError : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace monosplit
