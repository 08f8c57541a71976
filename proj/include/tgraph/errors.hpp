#pragma once

#include <stdexcept>
#include <string>

namespace tgraph {

// Library-wide error hierarchy. Precondition violations on programmatic
// arguments raise std::invalid_argument; everything below is a runtime
// condition the CLI maps to an exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unusable input data: parse failures, non-finite values, degenerate variables.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine could not produce a valid result.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public NumericError {
 public:
  NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
      : NumericError(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// A variable with zero (or negative) variance where a positive one is required.
class DegenerateInputError : public DataError {
 public:
  DegenerateInputError(const std::string& what, int index)
      : DataError(what), index_(index) {}

  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace tgraph
