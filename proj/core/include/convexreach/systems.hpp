#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convexreach/criterion.hpp"
#include "convexreach/linalg.hpp"
#include "convexreach/odeint.hpp"
#include "convexreach/vector_field.hpp"

namespace convexreach {

/// Damped pendulum x1' = x2, x2' = -omega^2 sin(x1) - 2 gamma x2.
struct PendulumParams {
  double omega = 1.0;  // 1/time
  double gamma = 0.0;  // 1/time

  /// Throws PreconditionError unless omega > 0 and gamma >= 0.
  void validate() const;
  /// omega = 6.1, gamma = 0.2.
  static PendulumParams cart_pole() { return {6.1, 0.2}; }
};

VectorFieldModel pendulum_model(const PendulumParams& params);

/// sup over x of the spectral norm of the pendulum Jacobian.
double pendulum_sup_jacobian_norm(const PendulumParams& params);

/// M1 / (omega^2 (exp(M1 |t1|) - 1)) with
/// M1 = -sign(t1) gamma + 3 sqrt(gamma^2 + (1 + omega^2)^2 / 4). Throws for t1 == 0.
double pendulum_bound_A(const PendulumParams& params, double t1);

/// 6 omega k / ((1 + (omega + gamma)^2)^{3/2} sinh(k t1) (cosh(2 k t1) + 5 - 10 exp(-omega)))
/// with k = sqrt(omega^2 + gamma^2). Valid for t1 > 0, 2 sqrt(omega^2 - gamma^2) t1 <= pi,
/// omega >= 1 and 0 <= gamma <= omega; throws PreconditionError naming the violated one.
double pendulum_bound_B(const PendulumParams& params, double t1);

/// Empty when (params, t1) is admissible for pendulum_bound_B, otherwise the reason.
std::optional<std::string> pendulum_bound_B_violation(const PendulumParams& params, double t1);

/// Scalar form of the convexity criterion for the pendulum in the Euclidean
/// metric. Since det V(tau) = exp(-2 gamma (tau - t0)) and x - x0 = s (-h2, h1)
/// with s = <x - x0, (-h2, h1)>, the pairing reduces to
///   s omega^2 int_{t0}^{t1} exp(2 gamma (tau - t0)) sin(phi_1(tau)) (V(tau) h)_1^3 dtau.
/// The trajectory (phi, V h) comes from dense output and the integral from
/// adaptive Gauss-Kronrod quadrature with relative tolerance `tol`.
double pendulum_criterion_quadrature(const PendulumParams& params, const Vector& x0, double r,
                                     double t0, double t1, const Vector& x, const Vector& h,
                                     double tol = 1e-10);

/// Planar field (nu_- x1 + g(x2), nu_+ x2), g(s) = alpha^2 / (2 m2) sin^2(m2 s / alpha),
/// whose ball images stop being convex once r m2 K(M1) exceeds 1 by a margin.
struct SharpnessSystem {
  VectorFieldModel model;
  double alpha = 0.0;
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  double epsilon = 0.0;
  /// +1 for t1 > 0, -1 for t1 < 0.
  int time_sign = 1;

  /// Centre (-r, 0) forward and (r, 0) backward; the ball boundary passes through the origin.
  Vector center(double r) const;
  /// Boundary point where the criterion equals r m2 K(M1 - epsilon).
  Vector critical_point() const { return Vector::Zero(2); }
  Vector critical_tangent() const { return Vector{{0.0, 1.0}}; }
};

/// Requires lambda_minus < lambda_plus, m2 > 0, 0 < epsilon < lambda_plus - lambda_minus
/// and t1_sign = +-1. alpha starts at (lambda_plus - lambda_minus) / 6 and is halved
/// until mu(D2 f) stays in [lambda_minus, lambda_plus] on 101 samples over one period.
/// Throws ConvergenceError with the violating sample when the search fails.
SharpnessSystem sharpness_model(double lambda_minus, double lambda_plus, double m2, double epsilon,
                                int t1_sign);

/// Reachable points (u t1, u^2 t1) of x1' = u, x2' = u^2 under constant controls
/// u on a uniform grid of n_controls values in [0, 1].
std::vector<Point2> closed_loop_counterexample_points(double t1, int n_controls);

/// Distance from (t1/2, t1/2) to the curve {(u t1, u^2 t1) : u in [0, 1]}.
double closed_loop_midpoint_distance(double t1);

/// x' = 0.
VectorFieldModel zero_model(int dim);

/// x' = A x with constants taken in `metric`.
VectorFieldModel linear_model(const Matrix& a, const MetricSpace& metric);
VectorFieldModel linear_model(const Matrix& a);

/// F(x) = (x1 + epsilon x2^2, x2).
MapC2 shear_map(double epsilon);

/// g(x) = |x1|^p + |x2|^p - r^p for p >= 2.
ScalarFieldC2 p_norm_level_set(double p, double r);

/// n points of the planar p-norm sphere of radius r, the first at (r, 0).
std::vector<Vector> p_norm_boundary_samples(double p, double r, int n);

using ParameterMap = std::map<std::string, double>;

/// Named model constructor with default parameters.
struct Preset {
  std::string name;
  std::string description;
  ParameterMap defaults;
  std::function<VectorFieldModel(const ParameterMap&)> build;
  /// Suggested ball centre for radius r; the origin when empty.
  std::function<Vector(const ParameterMap&, double r)> center;
};

/// Name-addressable preset catalogue. Additional presets are registered from
/// compiled code with add().
class PresetRegistry {
 public:
  /// Catalogue with pendulum, cart-pole, sharpness, zero and linear.
  static PresetRegistry builtin();

  void add(Preset preset);
  bool contains(const std::string& name) const;
  /// Throws PreconditionError for unknown names.
  const Preset& get(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Applies overrides to the defaults (unknown keys throw) and builds the model.
  VectorFieldModel build(const std::string& name, const ParameterMap& overrides = {}) const;
  Vector center(const std::string& name, const ParameterMap& overrides, double r) const;
  ParameterMap resolve(const std::string& name, const ParameterMap& overrides) const;

 private:
  std::map<std::string, Preset> presets_;
};

}  // namespace convexreach
