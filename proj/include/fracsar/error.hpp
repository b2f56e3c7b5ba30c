#pragma once

#include <stdexcept>
#include <string>

namespace fracsar {

/// Base of every error raised by the library. The category decides the CLI
/// exit status (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: bad exponents, scales, windows, combiners, flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the domain of a spectral model or kernel family.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed or mismatched data: grid mismatches, bad files, empty inputs.
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// Degenerate numerics: zero variance, singular covariance, diverging training.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, int epoch)
      : NumericError(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace fracsar
