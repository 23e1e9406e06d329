#pragma once

#include <stdexcept>
#include <string>

namespace mnmr {

// Shapes or sizes do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that must be symmetric positive definite failed to factorize,
// even after the ridge was applied. The message names the offending matrix.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(const std::string& matrix_name)
      : std::runtime_error("matrix '" + matrix_name +
                           "' is not positive definite"),
        matrix_name_(matrix_name) {}

  const std::string& matrix_name() const { return matrix_name_; }

 private:
  std::string matrix_name_;
};

// Invalid user-facing configuration (CLI flags, config file, hyperparameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, trajectories, windows).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model fitting failed across all attempts.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnmr
