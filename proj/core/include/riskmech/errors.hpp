#pragma once

#include <stdexcept>
#include <string>

namespace riskmech {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation outside a utility function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested marginal value has no preimage under the marginal utility.
class MarginalRangeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

// No incentive profile within the admissible price range meets the budget.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Operation requires a model shape (utility family, objective, coupling) it
// does not support.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskmech
