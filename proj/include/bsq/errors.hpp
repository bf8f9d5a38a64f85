#pragma once

#include <stdexcept>
#include <string>

namespace bsq {

/// Raised when arguments break an operation's contract (grid mismatch, bad sizes).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a physical-space field would hold NaN or Inf samples.
struct NonFiniteSample : ContractViolation {
  using ContractViolation::ContractViolation;
};

/// Raised when a mathematical precondition fails (nonzero mean, p < 1, ...).
struct PreconditionError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised by a time step that exceeds the CFL limit.
struct CflViolation : std::runtime_error {
  CflViolation(const std::string& what, double admissible)
      : std::runtime_error(what), admissible_dt(admissible) {}
  double admissible_dt;
};

/// Raised when a time step produces NaN or Inf coefficients.
struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bsq
