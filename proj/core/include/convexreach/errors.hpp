#pragma once

#include <stdexcept>
#include <string>

namespace convexreach {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree with the active dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated; what() names the violated condition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  enum class Kind { blow_up, domain_exit, step_underflow, step_limit, non_finite };

  IntegrationError(Kind kind, double t, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  /// Time at which the integration stopped.
  double time() const noexcept { return time_; }

 private:
  Kind kind_;
  double time_;
};

const char* to_string(IntegrationError::Kind kind) noexcept;

/// Raised when V(t1) is too ill-conditioned to trust V(t1)^{-1}.
class IllConditionedError : public Error {
 public:
  IllConditionedError(double condition_estimate, const std::string& what)
      : Error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

/// radius_bound with m2 <= 0: every radius is certified.
class UnboundedRadiusError : public Error {
 public:
  using Error::Error;
};

/// radius_bound with t1 == t0: the flow map is the identity.
class DegenerateIntervalError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a convexity certificate was called without one.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace convexreach
