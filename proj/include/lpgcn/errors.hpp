#pragma once

#include <stdexcept>
#include <string>

namespace lpgcn {

// Bad user input (files, ids, config values). CLI exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an algorithm. CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Power iteration exhausted max_iter; carries the best estimate seen.
struct ConvergenceError : NumericalError {
  ConvergenceError(const std::string& msg, double estimate_, double residual_)
      : NumericalError(msg), estimate(estimate_), residual(residual_) {}
  double estimate;
  double residual;
};

}  // namespace lpgcn
