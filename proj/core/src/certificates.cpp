#include "convexreach/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "convexreach/errors.hpp"

namespace convexreach {

BoundInputs BoundInputs::from_model(const VectorFieldModel& model, double t0, double t1) {
  return {model.lambda_minus, model.lambda_plus, model.m2, t0, t1};
}

double k_factor(double alpha, double dt) {
  if (!(dt >= 0.0)) throw PreconditionError("k_factor: dt must be >= 0");
  if (alpha == 0.0) return dt;
  const double x = alpha * dt;
  if (std::abs(x) < 1e-6) {
    // dt (1 + x/2 + x^2/6 + x^3/24)
    return dt * (1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0)));
  }
  return std::expm1(x) / alpha;
}

double m1_from_lambdas(const BoundInputs& inputs) {
  if (!(inputs.lambda_minus <= inputs.lambda_plus)) {
    throw PreconditionError("m1_from_lambdas: lambda_minus > lambda_plus");
  }
  if (inputs.t1 >= inputs.t0) return 2.0 * inputs.lambda_plus - inputs.lambda_minus;
  return inputs.lambda_plus - 2.0 * inputs.lambda_minus;
}

double radius_bound(const BoundInputs& inputs) {
  if (!(inputs.m2 > 0.0)) {
    throw UnboundedRadiusError("radius_bound: m2 <= 0, every radius is certified");
  }
  if (inputs.t1 == inputs.t0) {
    throw DegenerateIntervalError("radius_bound: t1 == t0, the flow map is the identity");
  }
  const double m1 = m1_from_lambdas(inputs);
  return 1.0 / (inputs.m2 * k_factor(m1, std::abs(inputs.t1 - inputs.t0)));
}

double lojasiewicz_bound(double sup_jac_norm, double m2, double t0, double t1) {
  if (!(sup_jac_norm >= 0.0)) throw PreconditionError("lojasiewicz_bound: sup_jac_norm < 0");
  if (!(m2 > 0.0)) throw UnboundedRadiusError("lojasiewicz_bound: m2 <= 0");
  if (t1 == t0) throw DegenerateIntervalError("lojasiewicz_bound: t1 == t0");
  return 1.0 / (m2 * k_factor(3.0 * sup_jac_norm, std::abs(t1 - t0)));
}

std::string to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::main_theorem:
      return "main_theorem";
    case BoundMethod::lojasiewicz:
      return "lojasiewicz";
    case BoundMethod::pendulum_A:
      return "pendulum_A";
    case BoundMethod::pendulum_B:
      return "pendulum_B";
    case BoundMethod::numerical:
      return "numerical";
  }
  return "unknown";
}

BoundMethod bound_method_from_string(const std::string& name) {
  for (BoundMethod m : {BoundMethod::main_theorem, BoundMethod::lojasiewicz,
                        BoundMethod::pendulum_A, BoundMethod::pendulum_B, BoundMethod::numerical}) {
    if (to_string(m) == name) return m;
  }
  throw PreconditionError("unknown bound method '" + name + "'");
}

void BoundCurve::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].radius > 0.0)) {
      throw PreconditionError("BoundCurve: non-positive radius at index " + std::to_string(i));
    }
    if (i > 0 && !(samples[i - 1].t1 <= samples[i].t1)) {
      throw PreconditionError("BoundCurve: samples not sorted by t1");
    }
  }
}

EstimatedConstants estimate_constants(const VectorFieldModel& model, const MetricSpace& metric,
                                      const StateBox& box, const EstimationConfig& config) {
  model.validate();
  const int n = model.dim;
  if (metric.dim() != n || box.lower.size() != n || box.upper.size() != n) {
    throw DimensionError("estimate_constants: dimension mismatch");
  }
  if (config.samples <= 0) throw PreconditionError("estimate_constants: samples must be positive");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double m2 = 0.0;
  double jnorm = 0.0;
  const double diameter = (box.upper - box.lower).norm();
  const double step = config.fd_step * std::max(1.0, diameter);

  Vector x(n), d(n);
  for (int s = 0; s < config.samples; ++s) {
    for (int i = 0; i < n; ++i) x(i) = box.lower(i) + unit(rng) * (box.upper(i) - box.lower(i));
    const Matrix jac = model.eval_jacobian(config.t, x);
    const auto [mum, mup] = metric.mu(jac);
    lo = std::min(lo, mum);
    hi = std::max(hi, mup);
    jnorm = std::max(jnorm, metric.operator_norm(jac));

    for (int i = 0; i < n; ++i) d(i) = gauss(rng);
    d *= step / metric.norm(d);
    const Matrix jac2 = model.eval_jacobian(config.t, x + d);
    m2 = std::max(m2, metric.operator_norm(jac2 - jac) / step);
  }

  const double widen = config.safety_factor - 1.0;
  EstimatedConstants c;
  c.lambda_minus = lo - widen * std::abs(lo);
  c.lambda_plus = hi + widen * std::abs(hi);
  c.m2 = config.safety_factor * m2;
  c.sup_jacobian_norm = config.safety_factor * jnorm;
  c.safety_factor = config.safety_factor;
  c.samples = config.samples;
  c.provenance = "sampled (non-rigorous), safety factor " + std::to_string(config.safety_factor);
  return c;
}

VectorFieldModel with_estimated_constants(VectorFieldModel model, const EstimatedConstants& c) {
  model.lambda_minus = c.lambda_minus;
  model.lambda_plus = c.lambda_plus;
  model.m2 = c.m2;
  model.sup_jacobian_norm = c.sup_jacobian_norm;
  model.constants_provenance = c.provenance;
  return model;
}

}  // namespace convexreach
