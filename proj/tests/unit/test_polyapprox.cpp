#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "convexreach/errors.hpp"
#include "convexreach/polyapprox.hpp"
#include "convexreach/systems.hpp"
#include "oracles.hpp"

using namespace convexreach;

namespace {

std::vector<SupportingHalfplane> circle(int n, double radius = 1.0) {
  std::vector<SupportingHalfplane> hp;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    const Point2 u(std::cos(t), std::sin(t));
    hp.push_back({radius * u, 3.0 * u});
  }
  return hp;
}

Polygon square(double half) {
  return Polygon{{{-half, -half}, {half, -half}, {half, half}, {-half, half}}};
}

ConvexityCertificate certified(const VectorFieldModel& m, const Vector& x0, double r, double t1) {
  return certify_ball(m, MetricSpace(2), x0, r, 0.0, t1);
}

}  // namespace

TEST(Polygon, BasicGeometry) {
  const Polygon sq = square(1.0);
  EXPECT_DOUBLE_EQ(sq.area(), 4.0);
  EXPECT_DOUBLE_EQ(sq.diameter(), 2.0 * std::sqrt(2.0));
  EXPECT_TRUE(sq.contains({0.5, 0.5}));
  EXPECT_FALSE(sq.contains({1.5, 0.0}));
  EXPECT_TRUE(sq.contains({1.0 + 1e-12, 0.0}, 1e-9));
  EXPECT_EQ(sq.distance_to({0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(sq.distance_to({3.0, 0.0}), 2.0);
  EXPECT_DOUBLE_EQ(sq.boundary_distance({0.0, 0.0}), 1.0);
  EXPECT_TRUE(sq.is_convex());
  const Polygon dart{{{0, 0}, {2, 0}, {1, 0.2}, {1, 2}}};
  EXPECT_FALSE(dart.is_convex());
}

TEST(ConvexHull, DropsInteriorAndCollinearPoints) {
  std::vector<Point2> pts{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 2}};
  const Polygon h = convex_hull(pts);
  EXPECT_EQ(h.vertices.size(), 4u);
  EXPECT_DOUBLE_EQ(h.area(), 4.0);
}

TEST(OuterInner, FourAxisSamplesOfCircle) {
  const auto hp = circle(4);
  const Polygon outer = outer_polygon(hp);
  const Polygon inner = inner_polygon(hp);
  EXPECT_NEAR(outer.area(), 4.0, 1e-14);
  EXPECT_NEAR(inner.area(), 2.0, 1e-14);
  EXPECT_EQ(outer.vertices.size(), 4u);
  EXPECT_TRUE(outer.is_convex());
}

TEST(OuterInner, CircleAreasConverge) {
  for (int n : {8, 36, 360}) {
    const auto hp = circle(n);
    const double outer = outer_polygon(hp).area();
    const double inner = inner_polygon(hp).area();
    EXPECT_NEAR(outer, n * std::tan(std::numbers::pi / n), 1e-12);
    EXPECT_NEAR(inner, 0.5 * n * std::sin(2 * std::numbers::pi / n), 1e-12);
    EXPECT_GT(outer, std::numbers::pi);
    EXPECT_LT(inner, std::numbers::pi);
  }
  const auto hp = circle(360);
  EXPECT_LT(outer_polygon(hp).area() - std::numbers::pi, 1e-3);
  EXPECT_LT(std::numbers::pi - inner_polygon(hp).area(), 1e-3);
  EXPECT_LE(hausdorff_gap(outer_polygon(hp), inner_polygon(hp)), 2e-4);
}

TEST(OuterInner, MergesNearParallelNormals) {
  auto hp = circle(6);
  SupportingHalfplane dup = hp[0];
  dup.point.x() += 0.5;  // looser copy of the same normal
  dup.normal = Point2(1.0, 1e-12);
  hp.push_back(dup);
  EXPECT_NEAR(outer_polygon(hp).area(), outer_polygon(circle(6)).area(), 1e-12);
}

TEST(OuterInner, RedundantHalfplanesAreDropped) {
  auto hp = circle(4);
  hp.push_back({{2.0, 2.0}, {1.0, 1.0}});
  const Polygon outer = outer_polygon(hp);
  EXPECT_EQ(outer.vertices.size(), 4u);
  EXPECT_NEAR(outer.area(), 4.0, 1e-14);
}

TEST(OuterInner, Errors) {
  auto hp = circle(4);
  hp.resize(2);
  EXPECT_THROW(outer_polygon(hp), PreconditionError);
  std::vector<SupportingHalfplane> half{
      {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}, {{0.7, 0.7}, {1, 1}}};
  EXPECT_THROW(outer_polygon(half), PreconditionError);
  hp = circle(4);
  hp[0].normal = Point2::Zero();
  EXPECT_THROW(outer_polygon(hp), PreconditionError);
}

TEST(Hausdorff, Examples) {
  EXPECT_EQ(hausdorff_gap(square(1.0), square(1.0)), 0.0);
  const Polygon diamond{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  EXPECT_NEAR(hausdorff_gap(square(1.0), diamond), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(hausdorff_gap(diamond, square(1.0)), PreconditionError);
}

TEST(BoundaryImage, ZeroFieldIsCircleWithRadialNormals) {
  const VectorFieldModel z = zero_model(2);
  const Vector x0{{1.0, -1.0}};
  const ConvexityCertificate c = certified(z, x0, 0.5, 1.0);
  const BoundaryImage img = boundary_image_with_normals(z, MetricSpace(2), x0, 0.5, 0.0, 1.0, 32, &c);
  ASSERT_EQ(img.halfplanes.size(), 32u);
  EXPECT_FALSE(img.unsound);
  for (const SupportingHalfplane& hp : img.halfplanes) {
    const Point2 d = hp.point - Point2(1.0, -1.0);
    EXPECT_NEAR(d.norm(), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(d.normalized().dot(hp.normal.normalized())), 1.0, 1e-14);
    EXPECT_GT(d.dot(hp.normal), 0.0);
  }
}

TEST(BoundaryImage, LinearFieldNormalsAreEllipseNormals) {
  Matrix a(2, 2);
  a << 0.3, 1.0, -0.5, -0.2;
  const VectorFieldModel lin = linear_model(a);
  const ConvexityCertificate c = certified(lin, Vector::Zero(2), 1.0, 1.2);
  const BoundaryImage img =
      boundary_image_with_normals(lin, MetricSpace(2), Vector::Zero(2), 1.0, 0.0, 1.2, 64, &c);
  const Matrix e = oracle::expm(1.2 * a);
  for (int k = 0; k < 64; ++k) {
    const double t = 2 * std::numbers::pi * k / 64;
    const Vector u{{std::cos(t), std::sin(t)}};
    const Vector tangent = e * Vector{{-std::sin(t), std::cos(t)}};
    const SupportingHalfplane& hp = img.halfplanes[static_cast<std::size_t>(k)];
    EXPECT_LE((hp.point - Point2(e * u)).norm(), 1e-8);
    const Vector n_ref = oracle::expm(-1.2 * a.transpose()) * u;
    EXPECT_LE((Vector(hp.normal) - n_ref).norm() / n_ref.norm(), 1e-8);
    EXPECT_NEAR(hp.normal.normalized().dot(Point2(tangent.normalized())), 0.0, 1e-8);
  }
}

TEST(BoundaryImage, PendulumHalfplanesSupport) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const Vector x0{{0.5, 0.2}};
  const ConvexityCertificate c = certified(p, x0, 0.05, 0.5);
  ASSERT_EQ(c.verdict, Verdict::certified_convex);
  const BoundaryImage img = boundary_image_with_normals(p, MetricSpace(2), x0, 0.05, 0.0, 0.5, 90, &c);
  for (const SupportingHalfplane& hp : img.halfplanes) {
    const Point2 n = hp.normal.normalized();
    for (const SupportingHalfplane& other : img.halfplanes) {
      EXPECT_LE(n.dot(other.point - hp.point), 1e-8);
    }
  }
}

TEST(BoundaryImage, WeightedMetricHalfplanesSupport) {
  Matrix q(2, 2);
  q << 3.0, 1.0, 1.0, 1.0;
  const MetricSpace m(q);
  const VectorFieldModel p = pendulum_model({1.0, 0.1});
  const Vector x0{{0.2, 0.0}};
  const ConvexityCertificate c = certify_ball(p, m, x0, 0.1, 0.0, 0.7);
  ASSERT_EQ(c.verdict, Verdict::certified_convex);
  const BoundaryImage img = boundary_image_with_normals(p, m, x0, 0.1, 0.0, 0.7, 60, &c);
  for (const SupportingHalfplane& hp : img.halfplanes) {
    const Point2 n = hp.normal.normalized();
    for (const SupportingHalfplane& other : img.halfplanes) {
      EXPECT_LE(n.dot(other.point - hp.point), 1e-8);
    }
  }
}

TEST(BoundaryImage, RefusesWithoutMatchingCertificate) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const MetricSpace m(2);
  EXPECT_THROW(boundary_image_with_normals(p, m, Vector::Zero(2), 0.1, 0.0, 1.0, 16, nullptr),
               RefusalError);
  ConvexityCertificate c = certified(p, Vector::Zero(2), 0.1, 1.0);
  EXPECT_THROW(boundary_image_with_normals(p, m, Vector::Zero(2), 0.2, 0.0, 1.0, 16, &c),
               RefusalError);
  EXPECT_THROW(boundary_image_with_normals(p, m, Vector::Zero(2), 0.1, 0.0, 2.0, 16, &c),
               RefusalError);
  EXPECT_NO_THROW(boundary_image_with_normals(p, m, Vector::Zero(2), 0.05, 0.0, 1.0, 16, &c));
  c.verdict = Verdict::inconclusive;
  EXPECT_THROW(boundary_image_with_normals(p, m, Vector::Zero(2), 0.1, 0.0, 1.0, 16, &c),
               RefusalError);
  BoundaryImageOptions opts;
  opts.allow_unsound = true;
  const BoundaryImage img =
      boundary_image_with_normals(p, m, Vector::Zero(2), 0.1, 0.0, 1.0, 16, &c, opts);
  EXPECT_TRUE(img.unsound);
  EXPECT_EQ(img.halfplanes.size(), 16u);
}

TEST(BoundaryImage, PendulumSandwichAndRefinement) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const ConvexityCertificate c = certified(p, Vector::Zero(2), 0.05, 0.5);
  double prev_gap = std::numeric_limits<double>::infinity();
  std::vector<double> area_gaps;
  for (int n : {32, 64, 128, 256}) {
    const BoundaryImage img =
        boundary_image_with_normals(p, MetricSpace(2), Vector::Zero(2), 0.05, 0.0, 0.5, n, &c);
    const Polygon outer = outer_polygon(img.halfplanes);
    const Polygon inner = inner_polygon(img.halfplanes);
    EXPECT_LE(inner.area(), outer.area());
    const double gap = hausdorff_gap(outer, inner);
    EXPECT_LE(gap, prev_gap);
    prev_gap = gap;
    area_gaps.push_back(outer.area() - inner.area());
  }
  // Area gap ~ 1/n^2: each doubling divides it by about 4.
  for (std::size_t i = 1; i < area_gaps.size(); ++i) {
    const double ratio = area_gaps[i - 1] / area_gaps[i];
    EXPECT_GT(ratio, 2.0);
    EXPECT_LT(ratio, 8.0);
  }
}
