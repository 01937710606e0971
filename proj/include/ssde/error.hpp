#pragma once

#include <stdexcept>
#include <string>

namespace ssde {

// Precondition violations: bad shapes, out-of-range parameters, empty inputs.
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A spectral gap fell below tolerance where a formula divides by it.
struct DegeneracyError : std::runtime_error {
  DegeneracyError(const std::string& msg, int index, double gap)
      : std::runtime_error(msg), index(index), gap(gap) {}
  int index;
  double gap;
};

// The stepper could not produce a valid state (e.g. persistent particle
// collision after the bisection budget).
struct IntegrationError : std::runtime_error {
  explicit IntegrationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-convergent fit. Carries the method-of-moments estimate so callers can
// still report something.
struct FitError : std::runtime_error {
  FitError(const std::string& msg, double moment_shape, double moment_rate)
      : std::runtime_error(msg), moment_shape(moment_shape), moment_rate(moment_rate) {}
  double moment_shape;
  double moment_rate;
};

}  // namespace ssde
