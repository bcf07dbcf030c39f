#include "convexreach/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "convexreach/errors.hpp"

namespace convexreach {

void PendulumParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw PreconditionError("pendulum: omega must be positive");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw PreconditionError("pendulum: gamma must be non-negative");
  }
}

namespace {

double pendulum_root(const PendulumParams& p) {
  const double s = 1.0 + p.omega * p.omega;
  return std::sqrt(p.gamma * p.gamma + 0.25 * s * s);
}

}  // namespace

double pendulum_sup_jacobian_norm(const PendulumParams& params) {
  params.validate();
  // The norm is convex in cos(x1), so the extremes cos = +-1 suffice.
  const double w2 = params.omega * params.omega;
  double best = 0.0;
  for (double c : {-1.0, 1.0}) {
    Matrix j(2, 2);
    j << 0.0, 1.0, -w2 * c, -2.0 * params.gamma;
    best = std::max(best, spectral_norm(j));
  }
  return best;
}

VectorFieldModel pendulum_model(const PendulumParams& params) {
  params.validate();
  const double w2 = params.omega * params.omega;
  const double g2 = 2.0 * params.gamma;
  VectorFieldModel m;
  m.name = "pendulum";
  m.dim = 2;
  m.value = [w2, g2](double, const Vector& x, Vector& out) {
    out(0) = x(1);
    out(1) = -w2 * std::sin(x(0)) - g2 * x(1);
  };
  m.jacobian = [w2, g2](double, const Vector& x, Matrix& out) {
    out(0, 0) = 0.0;
    out(0, 1) = 1.0;
    out(1, 0) = -w2 * std::cos(x(0));
    out(1, 1) = -g2;
  };
  m.hessian_action = [w2](double, const Vector& x, const Vector& h, Vector& out) {
    out(0) = 0.0;
    out(1) = w2 * h(0) * h(0) * std::sin(x(0));
  };
  const double root = pendulum_root(params);
  m.lambda_minus = -params.gamma - root;
  m.lambda_plus = -params.gamma + root;
  m.m2 = w2;
  m.sup_jacobian_norm = pendulum_sup_jacobian_norm(params);
  return m;
}

double pendulum_bound_A(const PendulumParams& params, double t1) {
  params.validate();
  if (t1 == 0.0 || !std::isfinite(t1)) {
    throw DegenerateIntervalError("pendulum_bound_A: t1 must be finite and non-zero");
  }
  const double sign = t1 > 0.0 ? 1.0 : -1.0;
  const double m1 = -sign * params.gamma + 3.0 * pendulum_root(params);
  return m1 / (params.omega * params.omega * std::expm1(m1 * std::abs(t1)));
}

std::optional<std::string> pendulum_bound_B_violation(const PendulumParams& params, double t1) {
  std::ostringstream os;
  if (!(t1 > 0.0) || !std::isfinite(t1)) {
    os << "t1 = " << t1 << " must be positive";
  } else if (!(params.omega >= 1.0)) {
    os << "omega = " << params.omega << " must be >= 1";
  } else if (!(params.gamma >= 0.0 && params.gamma <= params.omega)) {
    os << "gamma = " << params.gamma << " must lie in [0, omega]";
  } else {
    const double kappa_minus =
        std::sqrt(params.omega * params.omega - params.gamma * params.gamma);
    if (2.0 * kappa_minus * t1 > std::numbers::pi) {
      os << "2 kappa_- t1 = " << 2.0 * kappa_minus * t1 << " exceeds pi";
    } else {
      return std::nullopt;
    }
  }
  return os.str();
}

double pendulum_bound_B(const PendulumParams& params, double t1) {
  params.validate();
  if (auto why = pendulum_bound_B_violation(params, t1)) {
    throw PreconditionError("pendulum_bound_B: " + *why);
  }
  const double w = params.omega;
  const double g = params.gamma;
  const double kappa = std::sqrt(w * w + g * g);
  const double base = 1.0 + (w + g) * (w + g);
  const double denom = base * std::sqrt(base) * std::sinh(kappa * t1) *
                       (std::cosh(2.0 * kappa * t1) + 5.0 - 10.0 * std::exp(-w));
  return 6.0 * w * kappa / denom;
}

double pendulum_criterion_quadrature(const PendulumParams& params, const Vector& x0, double r,
                                     double t0, double t1, const Vector& x, const Vector& h,
                                     double tol) {
  params.validate();
  if (x0.size() != 2 || x.size() != 2 || h.size() != 2) {
    throw DimensionError("pendulum_criterion_quadrature: planar vectors expected");
  }
  const Vector d = x - x0;
  const double scale_r = std::max(1.0, r);
  if (std::abs(d.norm() - r) > 1e-8 * scale_r || std::abs(h.norm() - 1.0) > 1e-8 ||
      std::abs(d.dot(h)) > 1e-8 * scale_r) {
    throw PreconditionError(
        "pendulum_criterion_quadrature: need |x - x0| = r, |h| = 1 and h orthogonal to x - x0");
  }
  const double s = d.dot(Vector{{-h(1), h(0)}});
  if (s == 0.0 || t0 == t1) return 0.0;

  const double w2 = params.omega * params.omega;
  const double g2 = 2.0 * params.gamma;
  SystemProblem problem;
  problem.size = 4;
  problem.monitored = 2;
  problem.rhs = [w2, g2](double, const double* y, double* dy) {
    dy[0] = y[1];
    dy[1] = -w2 * std::sin(y[0]) - g2 * y[1];
    dy[2] = y[3];
    dy[3] = -w2 * std::cos(y[0]) * y[2] - g2 * y[3];
  };
  const Vector y0{{x(0), x(1), h(0), h(1)}};
  IntegratorOptions opts;
  opts.tol = std::min(1e-12, tol);
  const DenseOutput traj = solve(problem, t0, y0, t1, opts, true);

  auto integrand = [&](double tau) {
    const Vector y = traj(tau);
    const double z1 = y(2);
    return std::exp(g2 * (tau - t0)) * std::sin(y(0)) * z1 * z1 * z1;
  };
  const double a = std::min(t0, t1);
  const double b = std::max(t0, t1);
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, a, b, 20, tol, &error);
  const double oriented = t1 > t0 ? value : -value;
  return s * w2 * oriented;
}

Vector SharpnessSystem::center(double r) const {
  return Vector{{time_sign > 0 ? -r : r, 0.0}};
}

SharpnessSystem sharpness_model(double lambda_minus, double lambda_plus, double m2, double epsilon,
                                int t1_sign) {
  if (!(lambda_minus < lambda_plus)) {
    throw PreconditionError("sharpness_model: need lambda_minus < lambda_plus");
  }
  if (!(m2 > 0.0)) throw PreconditionError("sharpness_model: need m2 > 0");
  if (!(epsilon > 0.0 && epsilon < lambda_plus - lambda_minus)) {
    throw PreconditionError("sharpness_model: need 0 < epsilon < lambda_plus - lambda_minus");
  }
  if (t1_sign != 1 && t1_sign != -1) {
    throw PreconditionError("sharpness_model: t1_sign must be +1 or -1");
  }

  SharpnessSystem sys;
  sys.epsilon = epsilon;
  sys.time_sign = t1_sign;
  if (t1_sign > 0) {
    sys.nu_minus = lambda_minus + epsilon / 3.0;
    sys.nu_plus = lambda_plus - epsilon / 3.0;
  } else {
    sys.nu_minus = lambda_plus - epsilon / 3.0;
    sys.nu_plus = lambda_minus + epsilon / 3.0;
  }

  const MetricSpace euclid(2);
  const double nm = sys.nu_minus;
  const double np = sys.nu_plus;
  double alpha = (lambda_plus - lambda_minus) / 6.0;
  std::string violation;
  bool found = false;
  for (int attempt = 0; attempt < 60 && !found; ++attempt) {
    found = true;
    const double period = std::numbers::pi * alpha / m2;
    for (int k = 0; k <= 100; ++k) {
      const double s = period * k / 100.0;
      Matrix j(2, 2);
      j << nm, 0.5 * alpha * std::sin(2.0 * m2 * s / alpha), 0.0, np;
      const auto [lo, hi] = euclid.mu(j);
      if (lo < lambda_minus - 1e-12 || hi > lambda_plus + 1e-12) {
        std::ostringstream os;
        os << "alpha = " << alpha << ", x2 = " << s << ": mu = [" << lo << ", " << hi << "]";
        violation = os.str();
        found = false;
        alpha *= 0.5;
        break;
      }
    }
  }
  if (!found) throw ConvergenceError("sharpness_model: alpha search failed at " + violation);
  sys.alpha = alpha;

  VectorFieldModel& m = sys.model;
  m.name = "sharpness";
  m.dim = 2;
  const double a = alpha;
  m.value = [nm, np, a, m2](double, const Vector& x, Vector& out) {
    const double sn = std::sin(m2 * x(1) / a);
    out(0) = nm * x(0) + a * a / (2.0 * m2) * sn * sn;
    out(1) = np * x(1);
  };
  m.jacobian = [nm, np, a, m2](double, const Vector& x, Matrix& out) {
    out(0, 0) = nm;
    out(0, 1) = 0.5 * a * std::sin(2.0 * m2 * x(1) / a);
    out(1, 0) = 0.0;
    out(1, 1) = np;
  };
  m.hessian_action = [a, m2](double, const Vector& x, const Vector& h, Vector& out) {
    out(0) = m2 * std::cos(2.0 * m2 * x(1) / a) * h(1) * h(1);
    out(1) = 0.0;
  };
  m.lambda_minus = lambda_minus;
  m.lambda_plus = lambda_plus;
  m.m2 = m2;
  double sup = 0.0;
  for (double gp : {-0.5 * alpha, 0.5 * alpha}) {
    Matrix j(2, 2);
    j << nm, gp, 0.0, np;
    sup = std::max(sup, spectral_norm(j));
  }
  m.sup_jacobian_norm = sup;
  return sys;
}

std::vector<Point2> closed_loop_counterexample_points(double t1, int n_controls) {
  if (!(t1 > 0.0)) throw PreconditionError("closed_loop_counterexample_points: need t1 > 0");
  if (n_controls < 2) throw PreconditionError("closed_loop_counterexample_points: need n >= 2");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n_controls));
  for (int k = 0; k < n_controls; ++k) {
    const double u = static_cast<double>(k) / (n_controls - 1);
    pts.emplace_back(u * t1, u * u * t1);
  }
  return pts;
}

double closed_loop_midpoint_distance(double t1) {
  if (!(t1 > 0.0)) throw PreconditionError("closed_loop_midpoint_distance: need t1 > 0");
  auto dist2 = [t1](double u) {
    const double a = u * t1 - 0.5 * t1;
    const double b = u * u * t1 - 0.5 * t1;
    return a * a + b * b;
  };
  const auto [u, d2] = boost::math::tools::brent_find_minima(dist2, 0.0, 1.0, 40);
  (void)u;
  return std::sqrt(d2);
}

VectorFieldModel zero_model(int dim) {
  if (dim <= 0) throw DimensionError("zero_model: dim must be positive");
  VectorFieldModel m;
  m.name = "zero";
  m.dim = dim;
  m.value = [](double, const Vector&, Vector& out) { out.setZero(); };
  m.jacobian = [](double, const Vector&, Matrix& out) { out.setZero(); };
  m.hessian_action = [](double, const Vector&, const Vector&, Vector& out) { out.setZero(); };
  m.sup_jacobian_norm = 0.0;
  return m;
}

VectorFieldModel linear_model(const Matrix& a, const MetricSpace& metric) {
  if (a.rows() != a.cols() || a.rows() == 0 || metric.dim() != a.rows()) {
    throw DimensionError("linear_model: A must be square and match the metric");
  }
  VectorFieldModel m;
  m.name = "linear";
  m.dim = static_cast<int>(a.rows());
  m.value = [a](double, const Vector& x, Vector& out) { out.noalias() = a * x; };
  m.jacobian = [a](double, const Vector&, Matrix& out) { out = a; };
  m.hessian_action = [](double, const Vector&, const Vector&, Vector& out) { out.setZero(); };
  const auto [lo, hi] = metric.mu(a);
  m.lambda_minus = lo;
  m.lambda_plus = hi;
  m.m2 = 0.0;
  m.sup_jacobian_norm = metric.operator_norm(a);
  return m;
}

VectorFieldModel linear_model(const Matrix& a) {
  return linear_model(a, MetricSpace(static_cast<int>(a.rows())));
}

MapC2 shear_map(double epsilon) {
  MapC2 f;
  f.dim = 2;
  f.value = [epsilon](const Vector& x) {
    return Vector{{x(0) + epsilon * x(1) * x(1), x(1)}};
  };
  f.jacobian = [epsilon](const Vector& x) {
    Matrix j(2, 2);
    j << 1.0, 2.0 * epsilon * x(1), 0.0, 1.0;
    return j;
  };
  f.hessian_action = [epsilon](const Vector&, const Vector& h) {
    return Vector{{2.0 * epsilon * h(1) * h(1), 0.0}};
  };
  return f;
}

ScalarFieldC2 p_norm_level_set(double p, double r) {
  if (!(p >= 2.0)) throw PreconditionError("p_norm_level_set: need p >= 2 for a C^2 level set");
  if (!(r > 0.0)) throw PreconditionError("p_norm_level_set: need r > 0");
  ScalarFieldC2 g;
  g.dim = 2;
  g.value = [p, r](const Vector& x) {
    return std::pow(std::abs(x(0)), p) + std::pow(std::abs(x(1)), p) - std::pow(r, p);
  };
  g.gradient = [p](const Vector& x) {
    Vector d(2);
    for (int i = 0; i < 2; ++i) {
      d(i) = p * std::pow(std::abs(x(i)), p - 1.0) * (x(i) < 0.0 ? -1.0 : 1.0);
    }
    return d;
  };
  g.hessian = [p](const Vector& x) {
    Matrix hm = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      hm(i, i) = p == 2.0 ? 2.0 : p * (p - 1.0) * std::pow(std::abs(x(i)), p - 2.0);
    }
    return hm;
  };
  return g;
}

std::vector<Vector> p_norm_boundary_samples(double p, double r, int n) {
  if (n < 1) throw PreconditionError("p_norm_boundary_samples: need n >= 1");
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double norm = std::pow(std::pow(std::abs(c), p) + std::pow(std::abs(s), p), 1.0 / p);
    pts.push_back(Vector{{r * c / norm, r * s / norm}});
  }
  return pts;
}

void PresetRegistry::add(Preset preset) {
  if (preset.name.empty() || !preset.build) {
    throw PreconditionError("PresetRegistry::add: preset needs a name and a builder");
  }
  presets_[preset.name] = std::move(preset);
}

bool PresetRegistry::contains(const std::string& name) const { return presets_.count(name) > 0; }

const Preset& PresetRegistry::get(const std::string& name) const {
  auto it = presets_.find(name);
  if (it == presets_.end()) {
    std::string known;
    for (const auto& [key, _] : presets_) known += (known.empty() ? "" : ", ") + key;
    throw PreconditionError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> PresetRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [key, _] : presets_) out.push_back(key);
  return out;
}

ParameterMap PresetRegistry::resolve(const std::string& name, const ParameterMap& overrides) const {
  const Preset& preset = get(name);
  ParameterMap params = preset.defaults;
  for (const auto& [key, value] : overrides) {
    if (!params.count(key)) {
      throw PreconditionError("preset '" + name + "' has no parameter '" + key + "'");
    }
    params[key] = value;
  }
  return params;
}

VectorFieldModel PresetRegistry::build(const std::string& name,
                                       const ParameterMap& overrides) const {
  return get(name).build(resolve(name, overrides));
}

Vector PresetRegistry::center(const std::string& name, const ParameterMap& overrides,
                              double r) const {
  const Preset& preset = get(name);
  const ParameterMap params = resolve(name, overrides);
  if (preset.center) return preset.center(params, r);
  return Vector::Zero(preset.build(params).dim);
}

PresetRegistry PresetRegistry::builtin() {
  PresetRegistry reg;
  auto pendulum = [](const ParameterMap& p) {
    return pendulum_model(PendulumParams{p.at("omega"), p.at("gamma")});
  };
  reg.add({"pendulum", "damped pendulum", {{"omega", 1.0}, {"gamma", 0.0}}, pendulum, {}});
  const PendulumParams cp = PendulumParams::cart_pole();
  reg.add({"cart-pole", "damped pendulum with cart-pole parameters",
           {{"omega", cp.omega}, {"gamma", cp.gamma}}, pendulum, {}});

  auto sharp = [](const ParameterMap& p) {
    return sharpness_model(p.at("lambda_minus"), p.at("lambda_plus"), p.at("m2"),
                           p.at("epsilon"), p.at("t1_sign") < 0.0 ? -1 : 1);
  };
  reg.add({"sharpness",
           "field attaining the radius bound up to epsilon",
           {{"lambda_minus", -1.0}, {"lambda_plus", 1.0}, {"m2", 1.0}, {"epsilon", 0.05},
            {"t1_sign", 1.0}},
           [sharp](const ParameterMap& p) { return sharp(p).model; },
           [sharp](const ParameterMap& p, double r) { return sharp(p).center(r); }});

  reg.add({"zero", "x' = 0", {{"dim", 2.0}},
           [](const ParameterMap& p) { return zero_model(static_cast<int>(p.at("dim"))); }, {}});

  reg.add({"linear", "x' = A x",
           {{"a11", -0.5}, {"a12", 1.0}, {"a21", -1.0}, {"a22", -0.5}},
           [](const ParameterMap& p) {
             Matrix a(2, 2);
             a << p.at("a11"), p.at("a12"), p.at("a21"), p.at("a22");
             return linear_model(a);
           },
           {}});
  return reg;
}

}  // namespace convexreach
