#include <benchmark/benchmark.h>

#include <numbers>

#include "convexreach/certificates.hpp"
#include "convexreach/criterion.hpp"
#include "convexreach/metric.hpp"
#include "convexreach/odeint.hpp"
#include "convexreach/polyapprox.hpp"
#include "convexreach/systems.hpp"

using namespace convexreach;

static void BM_KFactor(benchmark::State& state) {
  double alpha = 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_factor(alpha, 0.25));
    alpha += 1e-12;
  }
}
BENCHMARK(BM_KFactor);

static void BM_MuWeighted(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Matrix q = Matrix::Identity(n, n);
  q(0, 0) = 2.0;
  const MetricSpace metric(q);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = std::sin(1.0 + i + 2.0 * j);
  }
  for (auto _ : state) benchmark::DoNotOptimize(metric.mu(a));
}
BENCHMARK(BM_MuWeighted)->Arg(2)->Arg(6)->Arg(12);

static void BM_FlowBundle(benchmark::State& state) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const Vector x0{{0.3, 0.1}};
  const Vector h{{0.0, 1.0}};
  const IntegratorOptions opts{.tol = std::pow(10.0, -static_cast<double>(state.range(0)))};
  for (auto _ : state) benchmark::DoNotOptimize(flow_bundle(p, 0.0, x0, 1.0, h, opts).x_end);
}
BENCHMARK(BM_FlowBundle)->Arg(8)->Arg(10)->Arg(12);

static void BM_CriterionLhs(benchmark::State& state) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  const Vector x0 = Vector::Zero(2);
  const double r = 0.5;
  const Vector x{{0.3, 0.4}};
  const Vector h{{-0.8, 0.6}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(criterion_lhs(p, MetricSpace(2), x0, r, 0.0, 1.0, x, h));
  }
}
BENCHMARK(BM_CriterionLhs);

static void BM_CertifyBall(benchmark::State& state) {
  const VectorFieldModel p = pendulum_model({1.0, 0.0});
  SamplerConfig cfg;
  cfg.angles = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        certify_ball(p, MetricSpace(2), Vector::Zero(2), 0.5, 0.0, 1.0, cfg).sup_lhs);
  }
}
BENCHMARK(BM_CertifyBall)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_OuterPolygon(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<SupportingHalfplane> hp;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    const Point2 u(std::cos(t), std::sin(t));
    hp.push_back({Point2(2.0 * u.x(), u.y()), Point2(u.x() / 2.0, u.y())});
  }
  for (auto _ : state) benchmark::DoNotOptimize(outer_polygon(hp).area());
}
BENCHMARK(BM_OuterPolygon)->Arg(256)->Arg(4096);

BENCHMARK_MAIN();
