#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "convexreach/errors.hpp"
#include "convexreach/odeint.hpp"
#include "convexreach/systems.hpp"
#include "oracles.hpp"

using namespace convexreach;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Integrate, ZeroField) {
  const VectorFieldModel zero = zero_model(2);
  const DenseOutput sol = integrate(zero, 0.0, Vector{{1.0, 2.0}}, 3.7);
  EXPECT_EQ(sol.final_value(), (Vector{{1.0, 2.0}}));
}

TEST(Integrate, RotationClosedForm) {
  const VectorFieldModel rot = linear_model(mat2(0, 1, -1, 0));
  const DenseOutput sol = integrate(rot, 0.0, Vector{{1.0, 0.0}}, std::numbers::pi / 2);
  EXPECT_NEAR(sol.final_value()(0), 0.0, 1e-9);
  EXPECT_NEAR(sol.final_value()(1), -1.0, 1e-9);
  for (double t : {0.1, 0.5, 1.0, 1.3}) {
    const Vector x = sol(t);
    EXPECT_NEAR(x(0), std::cos(t), 1e-8);
    EXPECT_NEAR(x(1), -std::sin(t), 1e-8);
  }
}

TEST(Integrate, PendulumAgainstRk4) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const Vector x = integrate(p, 0.0, Vector{{0.1, 0.0}}, 1.0).final_value();
  const Vector ref = oracle::rk4_flow(p, 0.0, Vector{{0.1, 0.0}}, 1.0, 100000);
  EXPECT_LE((x - ref).norm(), 1e-7);
}

TEST(Integrate, BackwardTimeInvertsForward) {
  const VectorFieldModel p = pendulum_model({1.3, 0.2});
  const Vector x0{{0.4, -0.3}};
  const Vector x1 = integrate(p, 0.0, x0, 2.0).final_value();
  const Vector back = integrate(p, 2.0, x1, 0.0).final_value();
  EXPECT_LE((back - x0).norm(), 1e-8);
}

TEST(Integrate, GroupProperty) {
  const VectorFieldModel p = pendulum_model({1.0, 0.1});
  IntegratorOptions opts;
  opts.tol = 1e-10;
  const Vector x0{{1.0, 0.5}};
  const Vector direct = integrate(p, 0.0, x0, 1.5, opts).final_value();
  const Vector mid = integrate(p, 0.0, x0, 0.7, opts).final_value();
  const Vector split = integrate(p, 0.7, mid, 1.5, opts).final_value();
  EXPECT_LE((direct - split).norm(), 10.0 * opts.tol * (1.0 + direct.norm()));
}

TEST(Integrate, ErrorDecreasesWithTolerance) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  for (const Vector& x0 : {Vector{{0.1, 0.0}}, Vector{{1.0, 0.5}}, Vector{{2.5, -0.2}}}) {
    const Vector ref = oracle::rk4_flow(p, 0.0, x0, 2.0, 200000);
    double previous = std::numeric_limits<double>::infinity();
    for (double tol : {1e-4, 1e-6, 1e-8}) {
      IntegratorOptions opts;
      opts.tol = tol;
      const double err = (integrate(p, 0.0, x0, 2.0, opts).final_value() - ref).norm();
      EXPECT_LT(err, previous) << "tol " << tol;
      previous = err;
    }
  }
}

TEST(Integrate, BlowUpIsReported) {
  VectorFieldModel m;
  m.name = "riccati";
  m.dim = 1;
  m.value = [](double, const Vector& x, Vector& out) { out(0) = x(0) * x(0); };
  m.jacobian = [](double, const Vector& x, Matrix& out) { out(0, 0) = 2.0 * x(0); };
  try {
    integrate(m, 0.0, Vector{{1.0}}, 2.0);
    FAIL() << "expected blow-up";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), IntegrationError::Kind::blow_up);
    EXPECT_LT(e.time(), 1.0);
  }
}

TEST(Integrate, DomainExitIsReported) {
  VectorFieldModel m = linear_model(Matrix::Identity(1, 1));
  m.state_domain = StateBox{Vector{{-2.0}}, Vector{{2.0}}};
  try {
    integrate(m, 0.0, Vector{{1.0}}, 3.0);
    FAIL() << "expected domain exit";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), IntegrationError::Kind::domain_exit);
  }
}

TEST(FlowBundle, LinearMatchesMatrixExponential) {
  const Matrix a = mat2(-0.3, 1.2, -0.8, 0.1);
  const VectorFieldModel lin = linear_model(a);
  const FlowBundle fb = flow_bundle(lin, 0.5, Vector{{1.0, -1.0}}, 2.0, Vector{{0.6, 0.8}});
  EXPECT_LE(rel_err(fb.v_end, oracle::expm(1.5 * a)), 1e-8);
  ASSERT_TRUE(fb.w_end);
  EXPECT_LE(fb.w_end->norm(), 1e-14);
  EXPECT_TRUE(std::isfinite(fb.step_stats.condition_estimate));
}

TEST(FlowBundle, PendulumVariationsMatchFiniteDifferences) {
  const VectorFieldModel p = pendulum_model({1.0, 0.2});
  const Vector x0{{0.7, -0.4}};
  const Vector h{{0.6, 0.8}};
  IntegratorOptions opts;
  opts.tol = 1e-12;
  const FlowBundle fb = flow_bundle(p, 0.0, x0, 1.0, h, opts);
  EXPECT_LE(rel_err(fb.v_end, oracle::fd_variation(p, 0.0, x0, 1.0, 1e-5, 4000)), 1e-6);
  const Vector w_fd = oracle::fd_second_variation(p, 0.0, x0, 1.0, h, 1e-3, 4000);
  EXPECT_LE((*fb.w_end - w_fd).norm() / w_fd.norm(), 1e-4);
}

TEST(FlowBundle, AbelLiouville) {
  const VectorFieldModel p = pendulum_model({2.0, 0.3});
  const FlowBundle fb = flow_bundle(p, 0.0, Vector{{1.0, 0.0}}, 1.7, std::nullopt);
  // tr D2f = -2 gamma.
  EXPECT_NEAR(fb.v_end.determinant() / std::exp(-2.0 * 0.3 * 1.7), 1.0, 1e-6);
}

TEST(FlowBundle, InitialConditionIsIdentity) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const FlowBundle fb = flow_bundle(p, 1.0, Vector{{0.2, 0.1}}, 1.0, Vector{{1.0, 0.0}});
  EXPECT_TRUE(fb.v_end.isIdentity());
  EXPECT_TRUE(fb.w_end->isZero());
}

TEST(FlowBundle, SecondVariationNeedsHessian) {
  VectorFieldModel p = pendulum_model({1.0, 0.0});
  p.hessian_action = nullptr;
  EXPECT_THROW(flow_bundle(p, 0.0, Vector{{0.0, 0.0}}, 1.0, Vector{{1.0, 0.0}}),
               PreconditionError);
  EXPECT_NO_THROW(flow_bundle(p, 0.0, Vector{{0.0, 0.0}}, 1.0, std::nullopt));
}

TEST(Adjoint, ZeroFieldKeepsVector) {
  const Vector v{{0.3, -2.0}};
  const Vector psi = adjoint_transport(zero_model(2), MetricSpace(2), 0.0, Vector{{1.0, 1.0}}, 2.0, v);
  EXPECT_LE((psi - v).norm(), 1e-14);
}

TEST(Adjoint, LinearMatchesMatrixExponential) {
  const Matrix a = mat2(0.2, -1.0, 0.7, -0.4);
  const Vector v{{1.0, 2.0}};
  const Vector psi =
      adjoint_transport(linear_model(a), MetricSpace(2), 0.0, Vector{{0.0, 0.0}}, 1.3, v);
  const Vector ref = oracle::expm(-1.3 * a.transpose()) * v;
  EXPECT_LE((psi - ref).norm() / ref.norm(), 1e-8);
}

TEST(Adjoint, PairingInvariance) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  const VectorFieldModel p = pendulum_model({1.0, 0.1});
  Matrix q(2, 2);
  q << 2.0, 0.3, 0.3, 1.0;
  for (const MetricSpace& metric : {MetricSpace(2), MetricSpace(q)}) {
    for (int k = 0; k < 10; ++k) {
      const Vector x0{{g(rng), g(rng)}};
      const Vector v{{g(rng), g(rng)}};
      const Vector u{{g(rng), g(rng)}};
      const double t1 = 0.5 + 0.1 * k;
      const Vector psi = adjoint_transport(p, metric, 0.0, x0, t1, v);
      const FlowBundle fb = flow_bundle(p, 0.0, x0, t1, std::nullopt);
      EXPECT_NEAR(metric.inner(psi, fb.v_end * u), metric.inner(v, u), 1e-7);
    }
  }
}

TEST(VectorField, PendulumJacobianMatchesValue) {
  const VectorFieldModel p = pendulum_model({1.7, 0.4});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const Vector x{{u(rng), u(rng)}};
    Matrix fd(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e(j) = 1e-6;
      fd.col(j) = (p.eval(0.0, x + e) - p.eval(0.0, x - e)) / 2e-6;
    }
    EXPECT_LE((fd - p.eval_jacobian(0.0, x)).norm(), 1e-8);
    const Vector h{{u(rng), u(rng)}};
    const Vector h2 = p.eval_hessian_action(0.0, x, 3.0 * h);
    EXPECT_LE((h2 - 9.0 * p.eval_hessian_action(0.0, x, h)).norm(), 1e-12 * (1.0 + h2.norm()));
  }
}
