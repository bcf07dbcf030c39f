#pragma once

#include <functional>
#include <optional>
#include <string>

#include "convexreach/linalg.hpp"

namespace convexreach {

/// Axis-aligned box of admissible states.
struct StateBox {
  Vector lower;
  Vector upper;

  bool contains(const Vector& x) const;
  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i) < lower(i) || x(i) > upper(i)) return false;
    }
    return true;
  }
};

struct TimeInterval {
  double lower;
  double upper;
  bool contains(double t) const { return t >= lower && t <= upper; }
};

/// Right-hand side f(t, x) of x' = f(t, x) with its derivatives and the
/// curvature constants used by the a-priori radius bounds.
///
/// Callbacks write into caller-owned outputs that are already sized
/// (dim, dim x dim, dim). They may be invoked concurrently from several
/// threads and must therefore not mutate shared state.
struct VectorFieldModel {
  using ValueFn = std::function<void(double t, const Vector& x, Vector& out)>;
  using JacobianFn = std::function<void(double t, const Vector& x, Matrix& out)>;
  /// out = D2^2 f(t, x) h^2
  using HessianActionFn =
      std::function<void(double t, const Vector& x, const Vector& h, Vector& out)>;

  std::string name;
  int dim = 0;
  ValueFn value;
  JacobianFn jacobian;
  HessianActionFn hessian_action;  // empty when f is only C^{1,1}

  /// lambda_minus <= mu_-(D2 f) <= mu_+(D2 f) <= lambda_plus on the domain.
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  /// Lipschitz constant of the Jacobian in x.
  double m2 = 0.0;
  /// Bound on ||D2 f|| when known; used by the Lojasiewicz comparison bound.
  std::optional<double> sup_jacobian_norm;
  /// Where the constants came from ("analytic", "user", "sampled (non-rigorous)").
  std::string constants_provenance = "analytic";

  std::optional<TimeInterval> time_domain;
  std::optional<StateBox> state_domain;

  bool has_hessian() const { return static_cast<bool>(hessian_action); }

  Vector eval(double t, const Vector& x) const;
  Matrix eval_jacobian(double t, const Vector& x) const;
  Vector eval_hessian_action(double t, const Vector& x, const Vector& h) const;

  /// Checks dim > 0, callbacks present, lambda_minus <= lambda_plus and
  /// m2 >= 0. Throws PreconditionError.
  void validate() const;

  bool in_domain(double t, const Vector& x) const;
};

}  // namespace convexreach
