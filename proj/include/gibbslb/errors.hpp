#pragma once

#include <stdexcept>
#include <string>

namespace gibbslb {

// Error taxonomy shared by all modules. The CLI maps each class to a stage
// label in the report, so the type carries the category.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

// Raised when beta*(Emax-Emin) makes rho^{-1/4} unrepresentable.
struct ConditioningError : InputError {
  using InputError::InputError;
};

struct ResourceError : Error {
  using Error::Error;
};

struct NumericError : Error {
  double estimate = 0.0;
  NumericError(const std::string& what, double est) : Error(what), estimate(est) {}
  explicit NumericError(const std::string& what) : Error(what) {}
};

struct InternalError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace gibbslb
