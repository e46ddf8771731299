#pragma once

#include <stdexcept>
#include <string>

namespace curator {

// Base for all toolkit errors. The CLI maps subclasses to exit codes
// (config 2, data 3, external service 4).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: unknown keys, missing paths, invalid parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Anything wrong with input data or how an operation is used.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file content.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

// Data violates a cross-record invariant (duplicate ids, length mismatch).
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

// Operation called with arguments outside its contract.
class UsageError : public DataError {
 public:
  using DataError::DataError;
};

// Remote completion service unreachable or misbehaving.
class ServiceError : public Error {
 public:
  using Error::Error;
};

}  // namespace curator
