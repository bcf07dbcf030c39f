#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "convexreach/certificates.hpp"
#include "convexreach/criterion.hpp"
#include "convexreach/errors.hpp"
#include "convexreach/systems.hpp"
#include "oracles.hpp"

using namespace convexreach;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

void expect_witness_invariants(const ConvexityCertificate& c, const MetricSpace& m) {
  const Vector d = c.witness.x - c.center;
  EXPECT_NEAR(m.norm(d), c.radius, 1e-10 * std::max(1.0, c.radius));
  EXPECT_NEAR(m.norm(c.witness.h), 1.0, 1e-10);
  EXPECT_NEAR(m.inner(c.witness.h, d), 0.0, 1e-10 * std::max(1.0, c.radius));
  if (c.verdict == Verdict::certified_convex) {
    EXPECT_LE(c.sup_lhs, 1.0 - c.margin);
  }
  if (c.verdict == Verdict::certified_non_convex) {
    EXPECT_GE(c.sup_lhs, 1.0 + c.margin);
  }
}

}  // namespace

TEST(CriterionLhs, LinearFieldVanishes) {
  const VectorFieldModel lin = linear_model(mat2(-1, 2, -2, 0.5));
  const MetricSpace m(2);
  for (double t : {0.0, 1.0, 2.0}) {
    const Vector x{{std::cos(t), std::sin(t)}};
    const Vector h{{-std::sin(t), std::cos(t)}};
    EXPECT_EQ(criterion_lhs(lin, m, Vector::Zero(2), 1.0, 0.0, 1.5, x, h), 0.0);
  }
}

TEST(CriterionLhs, SharpnessConstructedPoint) {
  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  const double r = 0.1;
  const double lhs = criterion_lhs(s.model, MetricSpace(2), s.center(r), r, 0.0, 1.0,
                                   s.critical_point(), s.critical_tangent());
  const double expected = r * 1.0 * k_factor(3.0 - 0.05, 1.0);
  EXPECT_NEAR(lhs, expected, 1e-4 * expected);
}

TEST(CriterionLhs, SharpnessBackwardInTime) {
  const SharpnessSystem s = sharpness_model(-1.0, 2.0, 0.5, 0.1, -1);
  const double r = 0.2;
  const double lhs = criterion_lhs(s.model, MetricSpace(2), s.center(r), r, 0.0, -0.8,
                                   s.critical_point(), s.critical_tangent());
  // Backward M1 = lambda_+ - 2 lambda_-.
  const double expected = r * 0.5 * k_factor(4.0 - 0.1, 0.8);
  EXPECT_NEAR(lhs, expected, 1e-4 * expected);
}

TEST(CriterionLhs, AgreesWithPendulumQuadrature) {
  const PendulumParams pp{1.0, 0.0};
  const VectorFieldModel p = pendulum_model(pp);
  const Vector x0{{-0.1, 0.0}};
  const Vector x{{0.0, 0.0}};
  const Vector h{{0.0, 1.0}};
  const double a = criterion_lhs(p, MetricSpace(2), x0, 0.1, 0.0, 1.0, x, h);
  const double b = pendulum_criterion_quadrature(pp, x0, 0.1, 0.0, 1.0, x, h);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(CriterionLhs, Preconditions) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const MetricSpace m(2);
  const Vector x0 = Vector::Zero(2);
  EXPECT_THROW(criterion_lhs(p, m, x0, 1.0, 0, 1, Vector{{0.5, 0.0}}, Vector{{0.0, 1.0}}),
               PreconditionError);
  EXPECT_THROW(criterion_lhs(p, m, x0, 1.0, 0, 1, Vector{{1.0, 0.0}}, Vector{{0.0, 2.0}}),
               PreconditionError);
  EXPECT_THROW(criterion_lhs(p, m, x0, 1.0, 0, 1, Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}),
               PreconditionError);
  EXPECT_THROW(criterion_lhs(p, m, Vector::Zero(3), 1.0, 0, 1, Vector{{1.0, 0.0}},
                             Vector{{0.0, 1.0}}),
               DimensionError);
}

TEST(CriterionLhs, EvenInTangentOrientation) {
  // The frame sign s and the cubic factor (V h)_1^3 both flip with h.
  const PendulumParams pp{1.0, 0.1};
  const VectorFieldModel p = pendulum_model(pp);
  const Vector x0{{0.3, 0.2}};
  const double r = 0.15;
  const Vector x = x0 + r * Vector{{0.6, 0.8}};
  const Vector h{{-0.8, 0.6}};
  const double plus = pendulum_criterion_quadrature(pp, x0, r, 0.0, 1.0, x, h);
  const double minus = pendulum_criterion_quadrature(pp, x0, r, 0.0, 1.0, x, -h);
  EXPECT_NEAR(plus, minus, 1e-12);
  EXPECT_NE(plus, 0.0);
  EXPECT_NEAR(criterion_lhs(p, MetricSpace(2), x0, r, 0.0, 1.0, x, h), plus, 1e-6);
  EXPECT_NEAR(criterion_lhs(p, MetricSpace(2), x0, r, 0.0, 1.0, x, -h), plus, 1e-6);
}

TEST(CertifyBall, PendulumSmallRadiusIsConvex) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const MetricSpace m(2);
  const ConvexityCertificate c = certify_ball(p, m, Vector::Zero(2), 0.01, 0.0, 1.0);
  EXPECT_EQ(c.verdict, Verdict::certified_convex);
  EXPECT_EQ(c.samples_failed, 0);
  EXPECT_EQ(c.criterion, "ball");
  EXPECT_EQ(c.model_name, "pendulum");
  expect_witness_invariants(c, m);
}

TEST(CertifyBall, SharpnessAboveBoundIsNonConvex) {
  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  const MetricSpace m(2);
  const double r = 1.1 / k_factor(3.0, 1.0);
  const ConvexityCertificate c = certify_ball(s.model, m, s.center(r), r, 0.0, 1.0);
  EXPECT_EQ(c.verdict, Verdict::certified_non_convex);
  EXPECT_LE((c.witness.x - s.critical_point()).norm(), 1e-2);
  expect_witness_invariants(c, m);
}

TEST(CertifyBall, SharpnessBelowBoundIsConvex) {
  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  const double r = 0.9 / k_factor(3.0, 1.0);
  const ConvexityCertificate c = certify_ball(s.model, MetricSpace(2), s.center(r), r, 0.0, 1.0);
  EXPECT_EQ(c.verdict, Verdict::certified_convex);
}

TEST(CertifyBall, DegenerateCases) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const ConvexityCertificate c = certify_ball(p, MetricSpace(2), Vector::Zero(2), 0.0, 0.0, 1.0);
  EXPECT_EQ(c.verdict, Verdict::certified_convex);
  EXPECT_EQ(c.sup_lhs, 0.0);

  VectorFieldModel scalar = linear_model(Matrix::Constant(1, 1, -1.0));
  EXPECT_EQ(certify_ball(scalar, MetricSpace(1), Vector::Zero(1), 2.0, 0.0, 1.0).verdict,
            Verdict::certified_convex);
  EXPECT_THROW(certify_ball(p, MetricSpace(2), Vector::Zero(2), -1.0, 0.0, 1.0),
               PreconditionError);
}

TEST(CertifyBall, WeightedMetric) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const MetricSpace m(mat2(2.0, 0.5, 0.5, 1.0));
  const ConvexityCertificate c = certify_ball(p, m, Vector{{0.2, 0.0}}, 0.05, 0.0, 0.5);
  EXPECT_EQ(c.verdict, Verdict::certified_convex);
  expect_witness_invariants(c, m);
  const auto geo = oracle::check_certificate(p, m, c);
  EXPECT_TRUE(geo.consistent) << geo.detail;
}

TEST(CertifyBall, HigherDimensionNeverCertifiesConvexity) {
  // Decoupled pendulum and damped linear mode.
  VectorFieldModel m;
  m.name = "pendulum+linear";
  m.dim = 3;
  m.value = [](double, const Vector& x, Vector& out) {
    out(0) = x(1);
    out(1) = -std::sin(x(0));
    out(2) = -x(2);
  };
  m.jacobian = [](double, const Vector& x, Matrix& out) {
    out.setZero();
    out(0, 1) = 1.0;
    out(1, 0) = -std::cos(x(0));
    out(2, 2) = -1.0;
  };
  m.hessian_action = [](double, const Vector& x, const Vector& h, Vector& out) {
    out.setZero();
    out(1) = h(0) * h(0) * std::sin(x(0));
  };
  m.lambda_minus = -1.0;
  m.lambda_plus = 1.0;
  m.m2 = 1.0;
  SamplerConfig cfg;
  cfg.random_samples = 64;
  cfg.refine_steps = 50;
  const ConvexityCertificate small = certify_ball(m, MetricSpace(3), Vector::Zero(3), 0.01, 0, 1, cfg);
  EXPECT_EQ(small.verdict, Verdict::inconclusive);
  EXPECT_LT(small.sup_lhs, 1.0);

  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  VectorFieldModel lifted = m;
  lifted.name = "sharpness+linear";
  lifted.value = [f = s.model](double t, const Vector& x, Vector& out) {
    const Vector y = f.eval(t, x.head(2));
    out(0) = y(0);
    out(1) = y(1);
    out(2) = -x(2);
  };
  lifted.jacobian = [f = s.model](double t, const Vector& x, Matrix& out) {
    out.setZero();
    out.topLeftCorner(2, 2) = f.eval_jacobian(t, x.head(2));
    out(2, 2) = -1.0;
  };
  lifted.hessian_action = [f = s.model](double t, const Vector& x, const Vector& h, Vector& out) {
    out.setZero();
    out.head(2) = f.eval_hessian_action(t, x.head(2), h.head(2));
  };
  const double r = 1.5 / k_factor(3.0, 1.0);
  cfg.random_samples = 256;
  cfg.refine_steps = 400;
  const Vector x0{{-r, 0.0, 0.0}};
  const ConvexityCertificate big = certify_ball(lifted, MetricSpace(3), x0, r, 0, 1, cfg);
  EXPECT_EQ(big.verdict, Verdict::certified_non_convex);
}

TEST(CertifyBall, FailuresDegradeToInconclusive) {
  VectorFieldModel m = pendulum_model({1.0, 0.0});
  m.state_domain = StateBox{Vector{{-10.0, -0.05}}, Vector{{10.0, 10.0}}};
  const ConvexityCertificate c = certify_ball(m, MetricSpace(2), Vector::Zero(2), 0.1, 0.0, 1.0);
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
  EXPECT_GT(c.samples_failed, 0);
  EXPECT_FALSE(c.notes.empty());
}

TEST(CertifyBall, GeometricOracleAgrees) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const MetricSpace m(2);
  const ConvexityCertificate convex = certify_ball(p, m, Vector::Zero(2), 0.5, 0.0, 1.0);
  ASSERT_EQ(convex.verdict, Verdict::certified_convex);
  auto geo = oracle::check_certificate(p, m, convex);
  EXPECT_TRUE(geo.consistent) << geo.detail;

  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  const double r = 1.3 / k_factor(3.0, 1.0);
  const ConvexityCertificate bad = certify_ball(s.model, m, s.center(r), r, 0.0, 1.0);
  ASSERT_EQ(bad.verdict, Verdict::certified_non_convex);
  geo = oracle::check_certificate(s.model, m, bad);
  EXPECT_TRUE(geo.consistent) << geo.detail;
}

TEST(CertifyBall, SupLhsGrowsWithRadius) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  SamplerConfig cfg;
  cfg.angles = 64;
  double prev = 0.0;
  for (double r : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    const ConvexityCertificate c = certify_ball(p, MetricSpace(2), Vector{{0.3, 0.0}}, r, 0, 1, cfg);
    EXPECT_GT(c.sup_lhs, prev);
    prev = c.sup_lhs;
  }
}

TEST(NumericalRadius, LinearFieldIsUnbounded) {
  const VectorFieldModel lin = linear_model(mat2(-1, 1, -1, -1));
  SamplerConfig cfg;
  cfg.angles = 16;
  const RadiusSearchResult r =
      numerical_radius(lin, MetricSpace(2), Vector::Zero(2), 0, 1, 0.1, 10.0, 1e-3, cfg);
  EXPECT_TRUE(r.unbounded_within_bracket);
  EXPECT_EQ(r.radius, 10.0);
}

TEST(NumericalRadius, SharpnessClosedForm) {
  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  // The centre moves with r for this system, so bisect on certify_ball directly
  // through a field whose constructed point stays at the origin.
  const double expected = 1.0 / k_factor(3.0 - 0.05, 1.0);
  const double tol_r = 1e-4;
  double lo = 0.5 * expected;
  double hi = 1.5 * expected;
  while (hi - lo > tol_r) {
    const double mid = 0.5 * (lo + hi);
    const Verdict v = certify_ball(s.model, MetricSpace(2), s.center(mid), mid, 0, 1).verdict;
    (v == Verdict::certified_convex ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, expected, 2 * tol_r);
}

TEST(NumericalRadius, PendulumDominatesClosedFormBounds) {
  const PendulumParams pp{1.0, 0.0};
  const VectorFieldModel p = pendulum_model(pp);
  const double b = pendulum_bound_B(pp, 0.25);
  const double a = pendulum_bound_A(pp, 0.25);
  SamplerConfig cfg;
  cfg.angles = 128;
  const RadiusSearchResult r =
      numerical_radius(p, MetricSpace(2), Vector::Zero(2), 0, 0.25, 0.5 * a, 40.0, 1e-3, cfg);
  EXPECT_GE(r.radius, b);
  EXPECT_GE(b, a);
}

TEST(NumericalRadius, InvalidBracket) {
  const SharpnessSystem s = sharpness_model(-1.0, 1.0, 1.0, 0.05, 1);
  EXPECT_THROW(numerical_radius(s.model, MetricSpace(2), Vector{{-1.0, 0.0}}, 0, 1, 1.0, 0.5, 1e-3),
               PreconditionError);
  EXPECT_THROW(numerical_radius(s.model, MetricSpace(2), Vector{{-1.0, 0.0}}, 0, 1, 1.0, 2.0, 1e-3),
               PreconditionError);
}

TEST(Sublevel, IdentityOnEuclideanBall) {
  ScalarFieldC2 g;
  g.dim = 2;
  g.value = [](const Vector& x) { return x.squaredNorm() - 1.0; };
  g.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  g.hessian = [](const Vector&) { return Matrix(2.0 * Matrix::Identity(2, 2)); };
  MapC2 id;
  id.dim = 2;
  id.value = [](const Vector& x) { return x; };
  id.jacobian = [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); };
  id.hessian_action = [](const Vector&, const Vector&) { return Vector(Vector::Zero(2)); };
  std::vector<Vector> samples;
  for (int k = 0; k < 16; ++k) {
    const double t = 2 * std::numbers::pi * k / 16;
    samples.push_back(Vector{{std::cos(t), std::sin(t)}});
  }
  const ConvexityCertificate c = sublevel_image_convexity_check(g, id, samples);
  EXPECT_EQ(c.verdict, Verdict::certified_convex);
  EXPECT_EQ(c.sup_lhs, 0.0);
  EXPECT_EQ(c.criterion, "sublevel_image");
}

TEST(Sublevel, ShearCounterexample) {
  const ScalarFieldC2 g = p_norm_level_set(4.0, 1.0);
  const MapC2 f = shear_map(0.01);
  const std::vector<Vector> samples{Vector{{1.0, 0.0}}};
  const ConvexityCertificate c = sublevel_image_convexity_check(g, f, samples);
  EXPECT_EQ(c.verdict, Verdict::certified_non_convex);
  EXPECT_NEAR(c.sup_lhs - c.threshold, 0.08, 1e-12);
  EXPECT_NEAR(std::abs(c.witness.h(1)), 1.0, 1e-15);
}

TEST(Sublevel, FlowOfLinearSystemIsConvex) {
  ScalarFieldC2 g;
  g.dim = 2;
  g.value = [](const Vector& x) { return x.squaredNorm() - 0.25; };
  g.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  g.hessian = [](const Vector&) { return Matrix(2.0 * Matrix::Identity(2, 2)); };
  const MapC2 f = flow_map(linear_model(mat2(0.1, 1.0, -2.0, -0.3)), 0.0, 1.0);
  std::vector<Vector> samples;
  for (int k = 0; k < 12; ++k) {
    const double t = 2 * std::numbers::pi * k / 12;
    samples.push_back(Vector{{0.5 * std::cos(t), 0.5 * std::sin(t)}});
  }
  EXPECT_EQ(sublevel_image_convexity_check(g, f, samples).verdict, Verdict::certified_convex);
}

TEST(Sublevel, ThreeDimensionalQuadraticForm) {
  // F(x) = x + (0, 0, a x1 x2): F''(x)h^2 = (0, 0, 2 a h1 h2) is indefinite on
  // the tangent plane at the north pole, so single-direction probes along the
  // axes would miss it.
  const double a = 3.0;
  ScalarFieldC2 g;
  g.dim = 3;
  g.value = [](const Vector& x) { return x.squaredNorm() - 1.0; };
  g.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  g.hessian = [](const Vector&) { return Matrix(2.0 * Matrix::Identity(3, 3)); };
  MapC2 f;
  f.dim = 3;
  f.value = [a](const Vector& x) { return Vector{{x(0), x(1), x(2) + a * x(0) * x(1)}}; };
  f.jacobian = [a](const Vector& x) {
    Matrix j = Matrix::Identity(3, 3);
    j(2, 0) = a * x(1);
    j(2, 1) = a * x(0);
    return j;
  };
  f.hessian_action = [a](const Vector&, const Vector& h) {
    return Vector{{0.0, 0.0, 2.0 * a * h(0) * h(1)}};
  };
  const std::vector<Vector> samples{Vector{{0.0, 0.0, 1.0}}};
  const ConvexityCertificate c = sublevel_image_convexity_check(g, f, samples);
  EXPECT_EQ(c.verdict, Verdict::certified_non_convex);
  // Worst tangent is (1, 1, 0)/sqrt 2: lhs 2 * (2 a / 2) = 2a, rhs 2.
  EXPECT_NEAR(c.sup_lhs, a * 2.0, 1e-12);
  EXPECT_NEAR(c.threshold, 2.0, 1e-12);
}

TEST(Sublevel, Preconditions) {
  const ScalarFieldC2 g = p_norm_level_set(4.0, 1.0);
  const MapC2 f = shear_map(0.01);
  const std::vector<Vector> off{Vector{{0.5, 0.0}}};
  EXPECT_THROW(sublevel_image_convexity_check(g, f, off), PreconditionError);
  MapC2 singular = f;
  singular.jacobian = [](const Vector&) { return Matrix(Matrix::Zero(2, 2)); };
  const std::vector<Vector> on{Vector{{1.0, 0.0}}};
  EXPECT_THROW(sublevel_image_convexity_check(g, singular, on), PreconditionError);
  EXPECT_THROW(sublevel_image_convexity_check(g, f, std::vector<Vector>{}), PreconditionError);
}
