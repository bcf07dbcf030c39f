#include "convexreach/polyapprox.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "convexreach/errors.hpp"
#include "convexreach/parallel.hpp"

namespace convexreach {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

double Polygon::area() const {
  const std::size_t n = vertices.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(vertices[i], vertices[(i + 1) % n]);
  return 0.5 * twice;
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      d = std::max(d, (vertices[i] - vertices[j]).norm());
    }
  }
  return d;
}

double Polygon::scale() const {
  double m = 0.0;
  for (const Point2& v : vertices) m = std::max(m, v.norm());
  return m + diameter();
}

bool Polygon::contains(const Point2& p, double tol) const {
  const std::size_t n = vertices.size();
  if (n == 0) return false;
  if (n < 3) return distance_to(p) <= tol;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    if (cross(b - a, p - a) / len < -tol) return false;
  }
  return true;
}

double Polygon::boundary_distance(const Point2& p) const {
  const std::size_t n = vertices.size();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n == 1) return (p - vertices[0]).norm();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::min(d, segment_distance(p, vertices[i], vertices[(i + 1) % n]));
  }
  return d;
}

double Polygon::distance_to(const Point2& p) const {
  if (vertices.size() >= 3 && contains(p)) return 0.0;
  return boundary_distance(p);
}

bool Polygon::is_convex() const {
  const std::size_t n = vertices.size();
  if (n < 3) return true;
  const double s = scale();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const Point2& c = vertices[(i + 2) % n];
    if (cross(b - a, c - b) < -1e-12 * s * s) return false;
  }
  return true;
}

Polygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Polygon hull;
  if (pts.size() < 3) {
    hull.vertices = pts;
    return hull;
  }
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  hull.vertices = std::move(h);
  return hull;
}

namespace {

struct Line {
  Point2 point;
  Point2 dir;  // interior on the left
  Point2 unit_normal;
  double angle;
  double offset;  // unit_normal . point
};

Point2 intersect(const Line& a, const Line& b) {
  const double den = cross(a.dir, b.dir);
  const double s = cross(b.point - a.point, b.dir) / den;
  return a.point + s * a.dir;
}

bool outside(const Line& l, const Point2& p, double tol) {
  return l.unit_normal.dot(p) - l.offset > tol;
}

}  // namespace

Polygon outer_polygon(std::span<const SupportingHalfplane> halfplanes) {
  if (halfplanes.size() < 3) throw PreconditionError("outer_polygon: need at least 3 halfplanes");
  std::vector<Line> lines;
  lines.reserve(halfplanes.size());
  double scale = 0.0;
  for (const SupportingHalfplane& hp : halfplanes) {
    const double len = hp.normal.norm();
    if (!(len > 0.0) || !std::isfinite(len) || !hp.point.allFinite()) {
      throw PreconditionError("outer_polygon: zero or non-finite halfplane");
    }
    Line l;
    l.point = hp.point;
    l.unit_normal = hp.normal / len;
    l.dir = Point2(-l.unit_normal.y(), l.unit_normal.x());
    l.angle = std::atan2(l.unit_normal.y(), l.unit_normal.x());
    l.offset = l.unit_normal.dot(l.point);
    lines.push_back(l);
    scale = std::max(scale, hp.point.norm());
  }
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.angle < b.angle; });

  // Near-parallel normals: keep the tighter constraint.
  constexpr double merge_tol = 1e-9;
  std::vector<Line> merged;
  for (const Line& l : lines) {
    if (!merged.empty() && l.angle - merged.back().angle < merge_tol) {
      if (l.offset < merged.back().offset) merged.back() = l;
      continue;
    }
    merged.push_back(l);
  }
  if (merged.size() > 1 &&
      merged.front().angle + 2.0 * std::numbers::pi - merged.back().angle < merge_tol) {
    if (merged.back().offset < merged.front().offset) merged.front() = merged.back();
    merged.pop_back();
  }
  if (merged.size() < 3) throw PreconditionError("outer_polygon: fewer than 3 distinct normals");
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double next = i + 1 < merged.size() ? merged[i + 1].angle
                                              : merged.front().angle + 2.0 * std::numbers::pi;
    if (next - merged[i].angle >= std::numbers::pi) {
      std::ostringstream os;
      os << "outer_polygon: normals leave an angular gap of " << next - merged[i].angle
         << " >= pi; the intersection is unbounded";
      throw PreconditionError(os.str());
    }
  }

  const double tol = 1e-13 * std::max(1.0, scale);
  std::deque<Line> dq;
  for (const Line& l : merged) {
    while (dq.size() >= 2 && outside(l, intersect(dq[dq.size() - 2], dq.back()), tol)) {
      dq.pop_back();
    }
    while (dq.size() >= 2 && outside(l, intersect(dq[0], dq[1]), tol)) dq.pop_front();
    dq.push_back(l);
  }
  while (dq.size() >= 3 && outside(dq.front(), intersect(dq[dq.size() - 2], dq.back()), tol)) {
    dq.pop_back();
  }
  while (dq.size() >= 3 && outside(dq.back(), intersect(dq[0], dq[1]), tol)) dq.pop_front();
  if (dq.size() < 3) throw PreconditionError("outer_polygon: empty intersection");

  Polygon poly;
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const Point2 v = intersect(dq[i], dq[(i + 1) % dq.size()]);
    if (!poly.vertices.empty() && (v - poly.vertices.back()).norm() <= tol) continue;
    poly.vertices.push_back(v);
  }
  if (poly.vertices.size() > 1 && (poly.vertices.front() - poly.vertices.back()).norm() <= tol) {
    poly.vertices.pop_back();
  }
  return poly;
}

Polygon inner_polygon(std::span<const SupportingHalfplane> halfplanes) {
  std::vector<Point2> pts;
  pts.reserve(halfplanes.size());
  for (const SupportingHalfplane& hp : halfplanes) pts.push_back(hp.point);
  return convex_hull(pts);
}

double hausdorff_gap(const Polygon& outer, const Polygon& inner) {
  if (outer.vertices.size() < 3 || inner.vertices.empty()) {
    throw PreconditionError("hausdorff_gap: degenerate polygon");
  }
  const double tol = 1e-9 * outer.scale();
  for (const Point2& v : inner.vertices) {
    if (!outer.contains(v, tol)) {
      throw PreconditionError("hausdorff_gap: inner polygon is not contained in outer polygon");
    }
  }
  double gap = 0.0;
  for (const Point2& v : outer.vertices) gap = std::max(gap, inner.distance_to(v));
  return gap;
}

namespace {

std::string certificate_mismatch(const ConvexityCertificate* cert, const VectorFieldModel& model,
                                 const Vector& x0, double r, double t0, double t1) {
  if (cert == nullptr) return "no convexity certificate supplied";
  if (cert->verdict != Verdict::certified_convex) {
    return "certificate verdict is " + to_string(cert->verdict);
  }
  if (cert->criterion != "ball") return "certificate is not for a ball";
  if (cert->model_name != model.name) {
    return "certificate is for model '" + cert->model_name + "'";
  }
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  };
  if (!close(cert->t0, t0) || !close(cert->t1, t1)) return "certificate time interval differs";
  if (cert->center.size() != x0.size() ||
      (cert->center - x0).norm() > 1e-12 * std::max(1.0, x0.norm())) {
    return "certificate centre differs";
  }
  if (!(cert->radius >= r * (1.0 - 1e-12))) return "certificate radius is smaller";
  return {};
}

}  // namespace

BoundaryImage boundary_image_with_normals(const VectorFieldModel& model, const MetricSpace& metric,
                                          const Vector& x0, double r, double t0, double t1, int n,
                                          const ConvexityCertificate* certificate,
                                          const BoundaryImageOptions& options) {
  model.validate();
  if (model.dim != 2 || metric.dim() != 2 || x0.size() != 2) {
    throw DimensionError("boundary_image_with_normals: planar systems only");
  }
  if (n < 3) throw PreconditionError("boundary_image_with_normals: need n >= 3");
  if (!(r > 0.0)) throw PreconditionError("boundary_image_with_normals: radius must be positive");

  BoundaryImage image;
  const std::string mismatch = certificate_mismatch(certificate, model, x0, r, t0, t1);
  if (!mismatch.empty()) {
    if (!options.allow_unsound) throw RefusalError("refusing to approximate: " + mismatch);
    image.unsound = true;
  }

  struct Slot {
    bool ok = false;
    SupportingHalfplane hp;
    std::string failure;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));
  const Matrix& q = metric.weight();
  parallel_for(slots.size(), options.jobs, [&](std::size_t k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    const Vector u = metric.from_euclidean_unit(Vector{{std::cos(theta), std::sin(theta)}});
    const Vector x = x0 + r * u;
    try {
      const Vector y = integrate(model, t0, x, t1, options.integrator).final_value();
      const Vector psi = adjoint_transport(model, metric, t0, x, t1, u, options.integrator);
      slots[k].hp.point = y;
      slots[k].hp.normal = q * psi;
      slots[k].ok = slots[k].hp.normal.allFinite() && slots[k].hp.normal.norm() > 0.0;
      if (!slots[k].ok) slots[k].failure = "degenerate transported normal";
    } catch (const IntegrationError& e) {
      slots[k].failure = e.what();
    }
  });
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (slots[k].ok) {
      image.halfplanes.push_back(slots[k].hp);
    } else {
      image.skipped_angles.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / n);
      image.failures.push_back(slots[k].failure);
    }
  }
  return image;
}

}  // namespace convexreach
