#pragma once

#include <stdexcept>
#include <string>

namespace overage {

/// A parameter lies outside its domain (non-positive rate, negative threshold, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The infinite-buffer queue was asked to run at utilization >= 1.
class StabilityError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Adaptive quadrature exhausted its subdivision budget before meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// A simulation estimate cannot be formed (zero horizon, too few batches).
class EstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace overage
