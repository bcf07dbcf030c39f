#pragma once

#include <span>
#include <string>
#include <vector>

#include "convexreach/criterion.hpp"
#include "convexreach/linalg.hpp"
#include "convexreach/metric.hpp"
#include "convexreach/odeint.hpp"
#include "convexreach/vector_field.hpp"

namespace convexreach {

/// Convex polygon with counterclockwise vertices.
struct Polygon {
  std::vector<Point2> vertices;

  double area() const;
  double diameter() const;
  /// Largest |vertex| + diameter, used to scale tolerances.
  double scale() const;
  /// Inside or within tol of the boundary.
  bool contains(const Point2& p, double tol = 0.0) const;
  /// Euclidean distance to the polygon (0 inside).
  double distance_to(const Point2& p) const;
  /// Distance to the boundary (also for interior points).
  double boundary_distance(const Point2& p) const;
  /// Consecutive cross products >= -1e-12 scale^2.
  bool is_convex() const;
};

/// { y : <normal, y - point> <= 0 } with an unnormalized outward normal.
struct SupportingHalfplane {
  Point2 point;
  Point2 normal;
};

struct BoundaryImage {
  std::vector<SupportingHalfplane> halfplanes;
  /// Boundary angles whose integration failed.
  std::vector<double> skipped_angles;
  std::vector<std::string> failures;
  /// Set when produced without a matching convexity certificate.
  bool unsound = false;
};

struct BoundaryImageOptions {
  IntegratorOptions integrator = IntegratorOptions{.tol = 1e-10};
  /// Proceed without a convex certificate and flag the result unsound.
  bool allow_unsound = false;
  int jobs = 1;
};

/// Maps n boundary points x0 + r L^{-T}(cos t, sin t) of the metric ball through
/// the flow and transports their outward normals by the adjoint variational
/// equation. Throws RefusalError unless `certificate` certifies this ball (or a
/// larger one with the same centre and times) convex.
BoundaryImage boundary_image_with_normals(const VectorFieldModel& model, const MetricSpace& metric,
                                          const Vector& x0, double r, double t0, double t1, int n,
                                          const ConvexityCertificate* certificate,
                                          const BoundaryImageOptions& options = {});

/// Counterclockwise convex hull (monotone chain), collinear points dropped.
Polygon convex_hull(std::span<const Point2> points);

/// Intersection of the halfplanes. Normals closer than 1e-9 in angle are
/// merged; throws PreconditionError when an angular gap reaches pi.
Polygon outer_polygon(std::span<const SupportingHalfplane> halfplanes);

/// Convex hull of the halfplane points.
Polygon inner_polygon(std::span<const SupportingHalfplane> halfplanes);

/// Max over outer vertices of the distance to `inner`. Throws
/// PreconditionError unless inner lies inside outer (1e-9 scale).
double hausdorff_gap(const Polygon& outer, const Polygon& inner);

}  // namespace convexreach
