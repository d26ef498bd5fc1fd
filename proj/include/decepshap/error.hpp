#pragma once

#include <stdexcept>
#include <string>

namespace decepshap {

// Bad input data: malformed files, contract violations on user-supplied
// values. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model file does not match the expected schema or version.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid command-line or configuration values (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace decepshap
