#include "convexreach/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "convexreach/errors.hpp"

namespace convexreach {

// Dormand & Prince, "A family of embedded Runge-Kutta formulae" (1980);
// dense output coefficients from Hairer, Norsett & Wanner, DOPRI5.
namespace dp {
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

Vector DenseOutput::operator()(double t) const {
  Vector out(size_);
  evaluate(t, out.data(), size_);
  return out;
}

Vector DenseOutput::head(double t, int count) const {
  Vector out(count);
  evaluate(t, out.data(), count);
  return out;
}

void DenseOutput::evaluate(double t, double* out, int count) const {
  const double lo = std::min(t0_, t1_);
  const double hi = std::max(t0_, t1_);
  const double slack = 1e-12 * std::max({1.0, std::abs(t0_), std::abs(t1_)});
  if (t < lo - slack || t > hi + slack) {
    throw PreconditionError("DenseOutput: t outside the integration interval");
  }
  if (count > size_) throw DimensionError("DenseOutput: requested more components than stored");
  if (t0_ == t1_) {
    for (int i = 0; i < count; ++i) out[i] = initial_(i);
    return;
  }
  if (segment_start_.empty()) {
    throw PreconditionError("DenseOutput: dense output was not recorded");
  }
  const bool forward = t1_ > t0_;
  // Segment starts are monotone in the direction of integration.
  auto it = forward
                ? std::upper_bound(segment_start_.begin(), segment_start_.end(), t)
                : std::upper_bound(segment_start_.begin(), segment_start_.end(), t,
                                   [](double a, double b) { return a > b; });
  std::size_t seg = it == segment_start_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - segment_start_.begin()) - 1;
  seg = std::min(seg, segment_start_.size() - 1);

  const double theta = (t - segment_start_[seg]) / segment_step_[seg];
  const double theta1 = 1.0 - theta;
  const double* r = coefficients_.data() + seg * 5 * static_cast<std::size_t>(size_);
  const std::size_t n = static_cast<std::size_t>(size_);
  for (int i = 0; i < count; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    out[i] = r[k] +
             theta * (r[n + k] + theta1 * (r[2 * n + k] + theta * (r[3 * n + k] + theta1 * r[4 * n + k])));
  }
}

class DormandPrince {
 public:
  static DenseOutput run(const SystemProblem& problem, double t0, const Vector& y0, double t1,
                         const IntegratorOptions& options, bool keep_dense);
};

namespace {

double monitored_norm(const std::vector<double>& y, int monitored) {
  double s = 0.0;
  for (int i = 0; i < monitored; ++i) s += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

}  // namespace

DenseOutput DormandPrince::run(const SystemProblem& problem, double t0, const Vector& y0,
                               double t1, const IntegratorOptions& options, bool keep_dense) {
  const int n = problem.size;
  if (n <= 0 || y0.size() != n) throw DimensionError("solve: initial value has the wrong size");
  if (!(options.tol > 0.0)) throw PreconditionError("solve: tol must be positive");
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw PreconditionError("solve: non-finite time");
  const int monitored = problem.monitored < 0 ? n : std::min(problem.monitored, n);
  const std::size_t un = static_cast<std::size_t>(n);

  DenseOutput out;
  out.t0_ = t0;
  out.t1_ = t1;
  out.size_ = n;
  out.initial_ = y0;
  out.final_ = y0;

  std::vector<double> y(y0.data(), y0.data() + n);
  if (problem.in_domain && !problem.in_domain(t0, y.data())) {
    throw IntegrationError(IntegrationError::Kind::domain_exit, t0,
                           "initial point outside the model domain");
  }
  if (t0 == t1) return out;

  const double direction = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double rtol = options.tol;
  const double atol = options.tol;
  const double max_step = options.max_step > 0.0 ? std::min(options.max_step, span) : span;

  std::vector<double> k1(un), k2(un), k3(un), k4(un), k5(un), k6(un), k7(un), ytmp(un), ynew(un);
  auto f = [&](double t, const std::vector<double>& yy, std::vector<double>& dy) {
    problem.rhs(t, yy.data(), dy.data());
    ++out.stats_.rhs_evaluations;
  };

  double t = t0;
  f(t, y, k1);

  auto scaled_norm = [&](const std::vector<double>& v, const std::vector<double>& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double sk = atol + rtol * std::abs(ref[i]);
      s += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(s / static_cast<double>(n));
  };

  double h = options.initial_step;
  if (h <= 0.0) {
    // Hairer, Norsett & Wanner, Sec. II.4 starting step heuristic.
    const double d0 = scaled_norm(y, y);
    const double d1 = scaled_norm(k1, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, max_step);
    for (std::size_t i = 0; i < un; ++i) ytmp[i] = y[i] + direction * h0 * k1[i];
    f(t + direction * h0, ytmp, k2);
    for (std::size_t i = 0; i < un; ++i) k3[i] = (k2[i] - k1[i]);
    const double d2 = scaled_norm(k3, y) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, max_step});
  }

  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double facc1 = 1.0 / 0.2;
  constexpr double facc2 = 1.0 / 10.0;
  constexpr double safe = 0.9;
  double facold = 1e-4;
  bool last_rejected = false;

  std::size_t steps = 0;
  while (direction * (t1 - t) > 0.0) {
    if (steps++ >= options.max_steps) {
      throw IntegrationError(IntegrationError::Kind::step_limit, t,
                             "step limit reached at t=" + format_time(t));
    }
    const double remaining = std::abs(t1 - t);
    bool final_step = false;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      final_step = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError(IntegrationError::Kind::step_underflow, t,
                             "step size underflow at t=" + format_time(t));
    }
    const double hs = direction * h;

    for (std::size_t i = 0; i < un; ++i) ytmp[i] = y[i] + hs * dp::a21 * k1[i];
    f(t + dp::c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < un; ++i) ytmp[i] = y[i] + hs * (dp::a31 * k1[i] + dp::a32 * k2[i]);
    f(t + dp::c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < un; ++i)
      ytmp[i] = y[i] + hs * (dp::a41 * k1[i] + dp::a42 * k2[i] + dp::a43 * k3[i]);
    f(t + dp::c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < un; ++i)
      ytmp[i] = y[i] + hs * (dp::a51 * k1[i] + dp::a52 * k2[i] + dp::a53 * k3[i] + dp::a54 * k4[i]);
    f(t + dp::c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < un; ++i)
      ytmp[i] = y[i] + hs * (dp::a61 * k1[i] + dp::a62 * k2[i] + dp::a63 * k3[i] +
                             dp::a64 * k4[i] + dp::a65 * k5[i]);
    const double t_new = final_step ? t1 : t + hs;
    f(t_new, ytmp, k6);
    for (std::size_t i = 0; i < un; ++i)
      ynew[i] = y[i] + hs * (dp::a71 * k1[i] + dp::a73 * k3[i] + dp::a74 * k4[i] +
                             dp::a75 * k5[i] + dp::a76 * k6[i]);
    f(t_new, ynew, k7);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < un; ++i) {
      const double e = hs * (dp::e1 * k1[i] + dp::e3 * k3[i] + dp::e4 * k4[i] + dp::e5 * k5[i] +
                             dp::e6 * k6[i] + dp::e7 * k7[i]);
      const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sk) * (e / sk);
      finite = finite && std::isfinite(ynew[i]);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (!finite || !std::isfinite(err)) {
      h *= 0.1;
      ++out.stats_.rejected;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double h_new = h / fac;
      facold = std::max(err, 1e-4);
      ++out.stats_.accepted;
      out.stats_.max_error_estimate = std::max(out.stats_.max_error_estimate, err);

      if (keep_dense) {
        out.segment_start_.push_back(t);
        out.segment_step_.push_back(hs);
        const std::size_t base = out.coefficients_.size();
        out.coefficients_.resize(base + 5 * un);
        double* r = out.coefficients_.data() + base;
        for (std::size_t i = 0; i < un; ++i) {
          const double ydiff = ynew[i] - y[i];
          const double bspl = hs * k1[i] - ydiff;
          r[i] = y[i];
          r[un + i] = ydiff;
          r[2 * un + i] = bspl;
          r[3 * un + i] = ydiff - hs * k7[i] - bspl;
          r[4 * un + i] = hs * (dp::d1 * k1[i] + dp::d3 * k3[i] + dp::d4 * k4[i] +
                                dp::d5 * k5[i] + dp::d6 * k6[i] + dp::d7 * k7[i]);
        }
      }

      y.swap(ynew);
      k1.swap(k7);
      t = t_new;

      if (monitored_norm(y, monitored) > options.blowup_cap) {
        throw IntegrationError(IntegrationError::Kind::blow_up, t,
                               "state norm exceeded the blow-up cap at t=" + format_time(t));
      }
      if (problem.in_domain && !problem.in_domain(t, y.data())) {
        throw IntegrationError(IntegrationError::Kind::domain_exit, t,
                               "trajectory left the model domain at t=" + format_time(t));
      }
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = std::min(h_new, max_step);
      if (final_step) break;
    } else {
      h /= std::min(facc1, fac11 / safe);
      ++out.stats_.rejected;
      last_rejected = true;
    }
  }

  out.final_ = Eigen::Map<const Vector>(y.data(), n);
  return out;
}

DenseOutput solve(const SystemProblem& problem, double t0, const Vector& y0, double t1,
                  const IntegratorOptions& options, bool keep_dense) {
  return DormandPrince::run(problem, t0, y0, t1, options, keep_dense);
}

namespace {

DomainCheck model_domain_check(const VectorFieldModel& model) {
  if (!model.time_domain && !model.state_domain) return {};
  return [&model](double t, const double* y) {
    if (model.time_domain && !model.time_domain->contains(t)) return false;
    if (model.state_domain) {
      return model.state_domain->contains(Eigen::Map<const Vector>(y, model.dim));
    }
    return true;
  };
}

}  // namespace

DenseOutput integrate(const VectorFieldModel& model, double t0, const Vector& x0, double t1,
                      const IntegratorOptions& options) {
  model.validate();
  const int n = model.dim;
  if (x0.size() != n) throw DimensionError("integrate: x0 has the wrong dimension");
  SystemProblem problem;
  problem.size = n;
  problem.monitored = n;
  problem.in_domain = model_domain_check(model);
  problem.rhs = [&model, n](double t, const double* y, double* dy) {
    thread_local Vector x, fx;
    x = Eigen::Map<const Vector>(y, n);
    fx.resize(n);
    model.value(t, x, fx);
    Eigen::Map<Vector>(dy, n) = fx;
  };
  return solve(problem, t0, x0, t1, options, true);
}

Vector FlowBundle::solve_v(const Vector& rhs) const {
  if (rhs.size() != v_end.rows()) throw DimensionError("solve_v: rhs has the wrong dimension");
  Eigen::PartialPivLU<Matrix> lu(v_end);
  return lu.solve(rhs);
}

FlowBundle flow_bundle(const VectorFieldModel& model, double t0, const Vector& x0, double t1,
                       const std::optional<Vector>& h, const IntegratorOptions& options,
                       bool keep_dense) {
  model.validate();
  const int n = model.dim;
  if (x0.size() != n) throw DimensionError("flow_bundle: x0 has the wrong dimension");
  if (h && h->size() != n) throw DimensionError("flow_bundle: direction has the wrong dimension");
  if (h && !model.has_hessian()) {
    throw PreconditionError("flow_bundle: second variation requested but model '" + model.name +
                            "' has no hessian_action");
  }
  const bool second = h.has_value();
  const int size = n + n * n + (second ? n : 0);

  SystemProblem problem;
  problem.size = size;
  problem.monitored = n;
  problem.in_domain = model_domain_check(model);
  const Vector dir = second ? *h : Vector();
  problem.rhs = [&model, n, second, dir](double t, const double* y, double* dy) {
    thread_local Vector x, fx, z, hz;
    thread_local Matrix jac;
    x = Eigen::Map<const Vector>(y, n);
    fx.resize(n);
    jac.resize(n, n);
    model.value(t, x, fx);
    model.jacobian(t, x, jac);
    Eigen::Map<Vector>(dy, n) = fx;
    Eigen::Map<const Matrix> v(y + n, n, n);
    Eigen::Map<Matrix>(dy + n, n, n).noalias() = jac * v;
    if (second) {
      Eigen::Map<const Vector> w(y + n + n * n, n);
      z.noalias() = v * dir;
      hz.resize(n);
      model.hessian_action(t, x, z, hz);
      Eigen::Map<Vector>(dy + n + n * n, n).noalias() = jac * w + hz;
    }
  };

  Vector y0 = Vector::Zero(size);
  y0.head(n) = x0;
  Eigen::Map<Matrix>(y0.data() + n, n, n).setIdentity();

  FlowBundle bundle;
  bundle.t0 = t0;
  bundle.t1 = t1;
  bundle.direction = h;
  bundle.trajectory = solve(problem, t0, y0, t1, options, keep_dense);
  const Vector& yf = bundle.trajectory.final_value();
  bundle.x_end = yf.head(n);
  bundle.v_end = Eigen::Map<const Matrix>(yf.data() + n, n, n);
  if (second) bundle.w_end = yf.segment(n + n * n, n);
  bundle.step_stats = bundle.trajectory.stats();
  Eigen::PartialPivLU<Matrix> lu(bundle.v_end);
  const double rcond = lu.rcond();
  bundle.step_stats.condition_estimate =
      rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  return bundle;
}

Vector adjoint_transport(const VectorFieldModel& model, const MetricSpace& metric, double t0,
                         const Vector& x0, double t1, const Vector& v,
                         const IntegratorOptions& options) {
  model.validate();
  const int n = model.dim;
  if (metric.dim() != n) throw DimensionError("adjoint_transport: metric dimension mismatch");
  if (x0.size() != n || v.size() != n) {
    throw DimensionError("adjoint_transport: vector has the wrong dimension");
  }
  if (v.norm() == 0.0) throw PreconditionError("adjoint_transport: v must be nonzero");

  SystemProblem problem;
  problem.size = 2 * n;
  problem.monitored = n;
  problem.in_domain = model_domain_check(model);
  problem.rhs = [&model, &metric, n](double t, const double* y, double* dy) {
    thread_local Vector x, fx;
    thread_local Matrix jac;
    x = Eigen::Map<const Vector>(y, n);
    fx.resize(n);
    jac.resize(n, n);
    model.value(t, x, fx);
    model.jacobian(t, x, jac);
    Eigen::Map<Vector>(dy, n) = fx;
    Eigen::Map<const Vector> psi(y + n, n);
    if (metric.is_euclidean()) {
      Eigen::Map<Vector>(dy + n, n).noalias() = -jac.transpose() * psi;
    } else {
      Eigen::Map<Vector>(dy + n, n).noalias() = -(metric.adjoint(jac) * psi);
    }
  };
  Vector y0(2 * n);
  y0 << x0, v;
  const DenseOutput sol = solve(problem, t0, y0, t1, options, false);
  return sol.final_value().tail(n);
}

}  // namespace convexreach
