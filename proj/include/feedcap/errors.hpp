#pragma once

#include <stdexcept>
#include <string>

namespace feedcap {

// Base class for every error raised by the library. The CLI maps the
// concrete type onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or dimensionally inconsistent input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A quantity left its mathematical domain (log of a nonpositive number,
// singular resolvent, ...).
class NumericalDomainError : public Error {
 public:
  using Error::Error;
};

// An operation was called on an input violating its documented
// precondition (for example an undetectable pair for the stationary
// Riccati equation).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A fixed-point or iterative method did not converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

// The conic solver terminated without an optimal solution.
class SolverStatusError : public Error {
 public:
  SolverStatusError(const std::string& what, std::string status)
      : Error(what), status_(std::move(status)) {}
  const std::string& status() const { return status_; }

 private:
  std::string status_;
};

// The stationary strategy recovered from the SDP has no innovation power.
class DegenerateStrategyError : public Error {
 public:
  using Error::Error;
};

// Closed-loop simulation left any reasonable bound.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace feedcap

namespace feedcap {

// Every restart of a numerical optimizer failed; the best finite value
// seen (or -inf) is attached.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, double best_value)
      : Error(what), best_value_(best_value) {}
  double best_value() const { return best_value_; }

 private:
  double best_value_;
};

}  // namespace feedcap
