#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "convexreach/metric.hpp"
#include "convexreach/odeint.hpp"
#include "convexreach/vector_field.hpp"

namespace convexreach {

enum class Verdict { certified_convex, certified_non_convex, inconclusive };

std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& name);

/// Boundary sampling used by certify_ball and numerical_radius.
struct SamplerConfig {
  /// Boundary angles for dim == 2.
  int angles = 256;
  bool both_orientations = true;
  /// Golden-section refinement tolerance in the boundary angle.
  double refine_tol = 1e-10;
  /// |sup_lhs - threshold| < margin yields an inconclusive verdict.
  double margin = 1e-6;
  /// Cap on the condition estimate of V(t1).
  double condition_cap = 1e10;
  /// Fraction of failed samples above which the verdict degrades to inconclusive.
  double max_failure_fraction = 0.01;
  /// Random boundary samples and local refinement steps for dim > 2.
  int random_samples = 512;
  int refine_steps = 400;
  std::uint64_t seed = 1;
  int jobs = 1;
  IntegratorOptions integrator = IntegratorOptions{.tol = 1e-10};
};

/// Boundary point and unit tangent where the criterion is maximal.
struct Witness {
  Vector x;
  Vector h;
};

struct ConvexityCertificate {
  Verdict verdict = Verdict::inconclusive;
  /// Maximized left-hand side of the criterion.
  double sup_lhs = std::numeric_limits<double>::quiet_NaN();
  /// Right-hand side the left-hand side is compared with (1 for balls).
  double threshold = 1.0;
  Witness witness;
  double radius = std::numeric_limits<double>::quiet_NaN();
  Vector center;
  double t0 = 0.0;
  double t1 = 0.0;
  double margin = 1e-6;
  double refine_tol = 0.0;
  double integrator_tol = 0.0;
  int samples_evaluated = 0;
  int samples_failed = 0;
  std::string criterion;  // "ball" or "sublevel_image"
  std::string model_name;
  std::string constants_provenance;
  std::vector<std::string> notes;
};

/// <x - x0, V(t1)^{-1} w(t1)>, which equals the time integral of
/// <x - x0, V(tau)^{-1} D2^2 f (V(tau) h)^2> over [t0, t1]. x must lie on the
/// metric sphere of radius r around x0 and h must be a unit tangent there.
/// Throws IllConditionedError when cond(V(t1)) exceeds condition_cap.
double criterion_lhs(const VectorFieldModel& model, const MetricSpace& metric, const Vector& x0,
                     double r, double t0, double t1, const Vector& x, const Vector& h,
                     const IntegratorOptions& options = {}, double condition_cap = 1e10);

/// Maximizes criterion_lhs over the boundary of the ball B(x0, r).
///
/// In dim 2 the boundary is sampled on a uniform angle grid with both tangent
/// orientations and the best angle is refined by golden-section search. In
/// dim > 2 sampling cannot prove convexity, so only certified_non_convex or
/// inconclusive are returned.
ConvexityCertificate certify_ball(const VectorFieldModel& model, const MetricSpace& metric,
                                  const Vector& x0, double r, double t0, double t1,
                                  const SamplerConfig& config = {});

struct RadiusSearchResult {
  /// Largest radius certified convex.
  double radius = 0.0;
  /// Upper end of the final bracket.
  double upper = 0.0;
  /// True when r_hi itself was certified convex.
  bool unbounded_within_bracket = false;
  int iterations = 0;
  /// Radii whose verdict was inconclusive and which were treated as too large.
  std::vector<std::string> diagnostics;
};

/// Bisection on r between a convex r_lo and a non-convex (or blowing-up)
/// r_hi until the bracket is narrower than tol_r. A midpoint whose sup_lhs
/// falls inside the margin around the threshold is treated as too large, so
/// the returned radius is always certified convex; it is listed in
/// diagnostics. Throws PreconditionError when r_lo is not certified convex and
/// ConvergenceError when r_hi is inconclusive.
RadiusSearchResult numerical_radius(const VectorFieldModel& model, const MetricSpace& metric,
                                    const Vector& x0, double t0, double t1, double r_lo,
                                    double r_hi, double tol_r, const SamplerConfig& config = {});

/// Finds a bracket around r_guess by halving (until convex) and doubling
/// (until not convex) at most max_expansions times each, then bisects.
/// Throws ConvergenceError when no bracket is found.
RadiusSearchResult numerical_radius_from_guess(const VectorFieldModel& model,
                                               const MetricSpace& metric, const Vector& x0,
                                               double t0, double t1, double r_guess, double tol_r,
                                               const SamplerConfig& config = {},
                                               int max_expansions = 40);

/// C^2 scalar map g with gradient and Hessian.
struct ScalarFieldC2 {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

/// C^2 map F with Jacobian and Hessian action h -> F''(x) h^2.
struct MapC2 {
  int dim = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;
  std::function<Vector(const Vector&, const Vector&)> hessian_action;
};

struct SublevelCheckConfig {
  double margin = 1e-6;
  /// |g(x)| tolerance for boundary samples, relative to max(1, |x| |g'(x)|).
  double level_tol = 1e-8;
  /// Minimum |g'(x)| accepted as a submersion.
  double submersion_tol = 1e-8;
};

/// Checks g'(x) F'(x)^{-1} F''(x) h^2 <= g''(x) h^2 for all h in ker g'(x) at
/// every boundary sample of {g <= 0}. The condition is evaluated as a
/// quadratic form on ker g'(x), so every tangent direction is covered.
ConvexityCertificate sublevel_image_convexity_check(const ScalarFieldC2& g, const MapC2& f,
                                                    std::span<const Vector> boundary_samples,
                                                    const SublevelCheckConfig& config = {});

/// x -> phi(t1, t0, x) as a C^2 map (Jacobian V(t1), Hessian action w(t1)).
MapC2 flow_map(const VectorFieldModel& model, double t0, double t1,
               const IntegratorOptions& options = {});

}  // namespace convexreach
