#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convexreach/metric.hpp"
#include "convexreach/vector_field.hpp"

namespace convexreach {

/// Constants of the constant-bound radius certificate.
struct BoundInputs {
  double lambda_minus = 0.0;  // 1/time
  double lambda_plus = 0.0;   // 1/time
  double m2 = 0.0;            // 1/(state * time)
  double t0 = 0.0;
  double t1 = 0.0;

  static BoundInputs from_model(const VectorFieldModel& model, double t0, double t1);
};

/// K(alpha) = (exp(alpha dt) - 1) / alpha, K(0) = dt. dt must be >= 0.
double k_factor(double alpha, double dt);

/// 2 lambda_+ - lambda_- forward in time, lambda_+ - 2 lambda_- backward.
double m1_from_lambdas(const BoundInputs& inputs);

/// Radius R = 1 / (m2 K(M1, |t1 - t0|)) such that every ball of radius
/// r <= R has a convex image under phi(t1, t0, .).
/// Throws UnboundedRadiusError when m2 <= 0 and DegenerateIntervalError
/// when t1 == t0.
double radius_bound(const BoundInputs& inputs);

/// Same shape with M1 = 3 sup ||D2 f||. Never exceeds radius_bound when
/// sup_jac_norm bounds the Jacobian.
double lojasiewicz_bound(double sup_jac_norm, double m2, double t0, double t1);

enum class BoundMethod { main_theorem, lojasiewicz, pendulum_A, pendulum_B, numerical };

std::string to_string(BoundMethod method);
/// Throws PreconditionError on unknown names.
BoundMethod bound_method_from_string(const std::string& name);

struct BoundSample {
  double t1 = 0.0;
  double radius = 0.0;
};

/// Tabulated radius bound over t1, sorted by t1 with positive radii.
struct BoundCurve {
  BoundMethod method = BoundMethod::main_theorem;
  std::vector<BoundSample> samples;

  /// Throws PreconditionError if a radius is not positive or t1 is unsorted.
  void validate() const;
};

/// Constants estimated by sampling a state box. Not rigorous.
struct EstimatedConstants {
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double m2 = 0.0;
  double sup_jacobian_norm = 0.0;
  double safety_factor = 1.05;
  int samples = 0;
  std::string provenance;
};

struct EstimationConfig {
  int samples = 4096;
  double safety_factor = 1.05;
  /// Relative finite-difference step for Jacobian variation.
  double fd_step = 1e-5;
  double t = 0.0;
  std::uint64_t seed = 0x5eed;
};

/// Samples mu_{+-}(D2 f), ||D2 f|| and ||D2 f(x + d) - D2 f(x)|| / ||d|| over
/// `box` in the given metric, then widens the extremes by the safety factor.
EstimatedConstants estimate_constants(const VectorFieldModel& model, const MetricSpace& metric,
                                      const StateBox& box, const EstimationConfig& config = {});

/// Writes estimated constants into a copy of the model and marks them non-rigorous.
VectorFieldModel with_estimated_constants(VectorFieldModel model, const EstimatedConstants& c);

}  // namespace convexreach
