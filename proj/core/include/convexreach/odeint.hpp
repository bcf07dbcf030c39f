#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "convexreach/linalg.hpp"
#include "convexreach/metric.hpp"
#include "convexreach/vector_field.hpp"

namespace convexreach {

struct IntegratorOptions {
  /// Relative and absolute local error tolerance of each accepted step.
  double tol = 1e-10;
  /// Abort with IntegrationError::blow_up once the state norm exceeds this.
  double blowup_cap = 1e8;
  /// 0 selects the initial step automatically.
  double initial_step = 0.0;
  /// 0 means no cap besides |t1 - t0|.
  double max_step = 0.0;
  std::size_t max_steps = 1'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  /// Largest scaled error norm among accepted steps (<= 1 by construction).
  double max_error_estimate = 0.0;
  /// Estimated 1-norm condition number of V(t1); NaN when not computed.
  double condition_estimate = std::numeric_limits<double>::quiet_NaN();
};

/// Piecewise quartic continuous extension of a Dormand-Prince solution.
class DenseOutput {
 public:
  DenseOutput() = default;

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  int size() const noexcept { return size_; }
  bool has_dense() const noexcept { return !segment_start_.empty() || t0_ == t1_; }
  const Vector& final_value() const noexcept { return final_; }
  const StepStats& stats() const noexcept { return stats_; }

  /// Full solution vector at time t, which must lie between t0 and t1.
  Vector operator()(double t) const;
  /// First `count` components at time t.
  Vector head(double t, int count) const;

 private:
  friend class DormandPrince;
  void evaluate(double t, double* out, int count) const;

  double t0_ = 0.0;
  double t1_ = 0.0;
  int size_ = 0;
  Vector initial_;
  Vector final_;
  StepStats stats_;
  std::vector<double> segment_start_;
  std::vector<double> segment_step_;
  std::vector<double> coefficients_;  // 5 * size_ per segment
};

using SystemRhs = std::function<void(double t, const double* y, double* dydt)>;
using DomainCheck = std::function<bool(double t, const double* y)>;

struct SystemProblem {
  SystemRhs rhs;
  int size = 0;
  /// Leading components whose Euclidean norm is checked against blowup_cap.
  int monitored = -1;
  DomainCheck in_domain;  // optional
};

/// Adaptive Dormand-Prince 5(4) with PI step control. t1 < t0 integrates
/// backwards in time. Throws IntegrationError.
DenseOutput solve(const SystemProblem& problem, double t0, const Vector& y0, double t1,
                  const IntegratorOptions& options, bool keep_dense = true);

/// Trajectory phi(., t0, x0) of the model on [t0, t1] with dense output.
DenseOutput integrate(const VectorFieldModel& model, double t0, const Vector& x0, double t1,
                      const IntegratorOptions& options = {});

/// State, first variation and (optionally) directional second variation at t1.
struct FlowBundle {
  double t0 = 0.0;
  double t1 = 0.0;
  Vector x_end;
  /// D3 phi(t1, t0, x0).
  Matrix v_end;
  /// D3^2 phi(t1, t0, x0) h^2, present when a direction was requested.
  std::optional<Vector> w_end;
  std::optional<Vector> direction;
  StepStats step_stats;
  /// Dense output of the augmented state (x, vec(V), [w]); empty unless requested.
  DenseOutput trajectory;

  /// V_end^{-1} rhs by LU with partial pivoting.
  Vector solve_v(const Vector& rhs) const;
};

/// Integrates x' = f, V' = D2f V (V(t0) = I) and, when h is given,
/// w' = D2f w + D2^2 f (V h)^2 (w(t0) = 0) under one error control.
FlowBundle flow_bundle(const VectorFieldModel& model, double t0, const Vector& x0, double t1,
                       const std::optional<Vector>& h, const IntegratorOptions& options = {},
                       bool keep_dense = false);

/// psi(t1) for psi' = -(D2 f)^* psi, psi(t0) = v, adjoint taken in `metric`.
/// Satisfies <psi(t1), V(t1) u> = <v, u> for all u.
Vector adjoint_transport(const VectorFieldModel& model, const MetricSpace& metric, double t0,
                         const Vector& x0, double t1, const Vector& v,
                         const IntegratorOptions& options = {});

}  // namespace convexreach
