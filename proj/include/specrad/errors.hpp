#pragma once

#include <stdexcept>
#include <string>

namespace specrad {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes do not line up (non-square input, mismatched rows, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An argument is outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative kernel ran out of sweeps.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A documented precondition (sample-size floor, M >= n+p, ...) is violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A planner cannot produce a sample size for the requested accuracy.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The excitation Gramian has no positive minimum eigenvalue.
class DegenerateExcitationError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace specrad
