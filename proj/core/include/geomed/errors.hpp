#pragma once

#include <stdexcept>
#include <string>

namespace geomed {

// Error families. The CLI maps each family to its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, mismatched dimensions, infeasible configurations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or non-finite observations.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-convergence, singular evaluation points, undefined bounds.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The evaluation point coincides with a sample point where the gradient
// and Hessian of the objective are undefined.
class SingularPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace geomed
