#include "convexreach/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "convexreach/errors.hpp"
#include "convexreach/parallel.hpp"

namespace convexreach {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::certified_convex:
      return "certified_convex";
    case Verdict::certified_non_convex:
      return "certified_non_convex";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdict_from_string(const std::string& name) {
  for (Verdict v : {Verdict::certified_convex, Verdict::certified_non_convex, Verdict::inconclusive}) {
    if (to_string(v) == name) return v;
  }
  throw PreconditionError("unknown verdict '" + name + "'");
}

double criterion_lhs(const VectorFieldModel& model, const MetricSpace& metric, const Vector& x0,
                     double r, double t0, double t1, const Vector& x, const Vector& h,
                     const IntegratorOptions& options, double condition_cap) {
  const int n = model.dim;
  if (metric.dim() != n || x0.size() != n || x.size() != n || h.size() != n) {
    throw DimensionError("criterion_lhs: dimension mismatch");
  }
  if (!(r >= 0.0)) throw PreconditionError("criterion_lhs: radius must be >= 0");
  const Vector d = x - x0;
  const double scale = std::max(1.0, r);
  if (std::abs(metric.norm(d) - r) > 1e-8 * scale) {
    throw PreconditionError("criterion_lhs: x is not on the boundary sphere");
  }
  if (std::abs(metric.norm(h) - 1.0) > 1e-8) {
    throw PreconditionError("criterion_lhs: h is not a unit vector");
  }
  if (std::abs(metric.inner(h, d)) > 1e-8 * scale) {
    throw PreconditionError("criterion_lhs: h is not tangent at x");
  }

  const FlowBundle bundle = flow_bundle(model, t0, x, t1, h, options);
  if (!(bundle.step_stats.condition_estimate <= condition_cap)) {
    std::ostringstream os;
    os << "criterion_lhs: cond(V(t1)) ~ " << bundle.step_stats.condition_estimate
       << " exceeds cap " << condition_cap;
    throw IllConditionedError(bundle.step_stats.condition_estimate, os.str());
  }
  return metric.inner(d, bundle.solve_v(*bundle.w_end));
}

namespace {

struct Evaluation {
  bool ok = false;
  double value = -std::numeric_limits<double>::infinity();
  Vector x;
  Vector h;
  std::string failure;
};

ConvexityCertificate base_certificate(const VectorFieldModel& model, const Vector& x0, double r,
                                      double t0, double t1, const SamplerConfig& config) {
  ConvexityCertificate cert;
  cert.criterion = "ball";
  cert.threshold = 1.0;
  cert.radius = r;
  cert.center = x0;
  cert.t0 = t0;
  cert.t1 = t1;
  cert.margin = config.margin;
  cert.refine_tol = config.refine_tol;
  cert.integrator_tol = config.integrator.tol;
  cert.model_name = model.name;
  cert.constants_provenance = model.constants_provenance;
  return cert;
}

Verdict classify(double lhs, double threshold, double margin) {
  if (lhs <= threshold - margin) return Verdict::certified_convex;
  if (lhs >= threshold + margin) return Verdict::certified_non_convex;
  return Verdict::inconclusive;
}

// Boundary point and positively oriented tangent at angle theta (dim 2).
std::pair<Vector, Vector> boundary_frame(const MetricSpace& metric, const Vector& x0, double r,
                                         double theta) {
  Vector u(2), t(2);
  u << std::cos(theta), std::sin(theta);
  t << -std::sin(theta), std::cos(theta);
  return {x0 + r * metric.from_euclidean_unit(u), metric.from_euclidean_unit(t)};
}

class BallEvaluator {
 public:
  BallEvaluator(const VectorFieldModel& model, const MetricSpace& metric, const Vector& x0,
                double r, double t0, double t1, const SamplerConfig& config)
      : model_(model), metric_(metric), x0_(x0), r_(r), t0_(t0), t1_(t1), config_(config) {}

  Evaluation at(const Vector& x, const Vector& h) const {
    Evaluation e;
    e.x = x;
    e.h = h;
    try {
      e.value = criterion_lhs(model_, metric_, x0_, r_, t0_, t1_, x, h, config_.integrator,
                              config_.condition_cap);
      e.ok = std::isfinite(e.value);
      if (!e.ok) e.failure = "non-finite criterion value";
    } catch (const IntegrationError& err) {
      e.failure = err.what();
    } catch (const IllConditionedError& err) {
      e.failure = err.what();
    }
    return e;
  }

  // Max over both tangent orientations at angle theta.
  Evaluation at_angle(double theta) const {
    auto [x, h] = boundary_frame(metric_, x0_, r_, theta);
    Evaluation best = at(x, h);
    if (config_.both_orientations) {
      Evaluation other = at(x, -h);
      if (!best.ok || (other.ok && other.value > best.value)) best = std::move(other);
    }
    return best;
  }

 private:
  const VectorFieldModel& model_;
  const MetricSpace& metric_;
  const Vector& x0_;
  double r_, t0_, t1_;
  const SamplerConfig& config_;
};

ConvexityCertificate certify_planar(const VectorFieldModel& model, const MetricSpace& metric,
                                    const Vector& x0, double r, double t0, double t1,
                                    const SamplerConfig& config) {
  ConvexityCertificate cert = base_certificate(model, x0, r, t0, t1, config);
  const BallEvaluator eval(model, metric, x0, r, t0, t1, config);
  const int count = std::max(3, config.angles);
  const double step = 2.0 * std::numbers::pi / count;

  std::vector<Evaluation> samples(static_cast<std::size_t>(count));
  parallel_for(samples.size(), config.jobs,
               [&](std::size_t k) { samples[k] = eval.at_angle(step * static_cast<double>(k)); });

  int failed = 0;
  std::size_t best = samples.size();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].ok) {
      ++failed;
      if (failed == 1) cert.notes.push_back("sample failure: " + samples[k].failure);
      continue;
    }
    if (best == samples.size() || samples[k].value > samples[best].value) best = k;
  }
  cert.samples_evaluated = count * (config.both_orientations ? 2 : 1);
  cert.samples_failed = failed;

  if (best == samples.size()) {
    cert.notes.push_back("every boundary sample failed");
    return cert;
  }

  Evaluation top = samples[best];
  // Golden-section refinement around the best grid angle.
  double a = step * (static_cast<double>(best) - 1.0);
  double b = step * (static_cast<double>(best) + 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  Evaluation fc = eval.at_angle(c);
  Evaluation fd = eval.at_angle(d);
  int refinements = 2;
  while (std::abs(b - a) > config.refine_tol && fc.ok && fd.ok && refinements < 200) {
    if (fc.value > fd.value) {
      b = d;
      d = c;
      fd = std::move(fc);
      c = b - inv_phi * (b - a);
      fc = eval.at_angle(c);
    } else {
      a = c;
      c = d;
      fc = std::move(fd);
      d = a + inv_phi * (b - a);
      fd = eval.at_angle(d);
    }
    ++refinements;
  }
  for (const Evaluation* e : {&fc, &fd}) {
    if (e->ok && e->value > top.value) top = *e;
  }
  cert.samples_evaluated += refinements * (config.both_orientations ? 2 : 1);

  cert.sup_lhs = top.value;
  cert.witness = {top.x, top.h};
  if (static_cast<double>(failed) > config.max_failure_fraction * count) {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("more than " + std::to_string(config.max_failure_fraction * 100.0) +
                         "% of boundary samples failed");
    return cert;
  }
  cert.verdict = classify(cert.sup_lhs, 1.0, config.margin);
  return cert;
}

ConvexityCertificate certify_sampled(const VectorFieldModel& model, const MetricSpace& metric,
                                     const Vector& x0, double r, double t0, double t1,
                                     const SamplerConfig& config) {
  ConvexityCertificate cert = base_certificate(model, x0, r, t0, t1, config);
  const int n = model.dim;
  const BallEvaluator eval(model, metric, x0, r, t0, t1, config);

  // Maps a Euclidean direction and a raw tangent guess to a metric frame.
  auto frame = [&](const Vector& dir, const Vector& raw) -> std::optional<std::pair<Vector, Vector>> {
    const Vector u = metric.from_euclidean_unit(dir.normalized());
    Vector h = raw - metric.inner(raw, u) * u;
    const double hn = metric.norm(h);
    if (!(hn > 1e-12)) return std::nullopt;
    return std::make_pair(Vector(x0 + r * u), Vector(h / hn));
  };

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int count = std::max(1, config.random_samples);
  std::vector<Vector> dirs(static_cast<std::size_t>(count)), raws(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    dirs[static_cast<std::size_t>(k)] = Vector(n);
    raws[static_cast<std::size_t>(k)] = Vector(n);
    for (int i = 0; i < n; ++i) dirs[static_cast<std::size_t>(k)](i) = gauss(rng);
    for (int i = 0; i < n; ++i) raws[static_cast<std::size_t>(k)](i) = gauss(rng);
  }

  std::vector<Evaluation> samples(static_cast<std::size_t>(count));
  parallel_for(samples.size(), config.jobs, [&](std::size_t k) {
    auto fr = frame(dirs[k], raws[k]);
    if (!fr) {
      samples[k].failure = "degenerate tangent";
      return;
    }
    samples[k] = eval.at(fr->first, fr->second);
  });

  int failed = 0;
  std::size_t best = samples.size();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].ok) {
      ++failed;
      continue;
    }
    if (best == samples.size() || samples[k].value > samples[best].value) best = k;
  }
  cert.samples_evaluated = count;
  cert.samples_failed = failed;
  if (best == samples.size()) {
    cert.notes.push_back("every boundary sample failed");
    return cert;
  }

  // Random local search from the best sample with shrinking steps.
  Evaluation top = samples[best];
  Vector dir = dirs[best];
  Vector raw = top.h;
  double sigma = 0.1;
  int misses = 0;
  for (int it = 0; it < config.refine_steps && sigma > 1e-8; ++it) {
    Vector dir2 = dir, raw2 = raw;
    for (int i = 0; i < n; ++i) {
      dir2(i) += sigma * gauss(rng) * dir.norm();
      raw2(i) += sigma * gauss(rng);
    }
    auto fr = frame(dir2, raw2);
    ++cert.samples_evaluated;
    if (!fr) continue;
    Evaluation e = eval.at(fr->first, fr->second);
    if (e.ok && e.value > top.value) {
      top = std::move(e);
      dir = dir2;
      raw = top.h;
      misses = 0;
    } else if (++misses >= 10) {
      sigma *= 0.5;
      misses = 0;
    }
  }

  cert.sup_lhs = top.value;
  cert.witness = {top.x, top.h};
  if (static_cast<double>(failed) > config.max_failure_fraction * count) {
    cert.notes.push_back("more than 1% of boundary samples failed");
    return cert;
  }
  const Verdict v = classify(cert.sup_lhs, 1.0, config.margin);
  if (v == Verdict::certified_non_convex) {
    cert.verdict = v;
  } else {
    cert.verdict = Verdict::inconclusive;
    cert.notes.push_back("convexity is not certified by sampling in dimension > 2");
  }
  return cert;
}

}  // namespace

ConvexityCertificate certify_ball(const VectorFieldModel& model, const MetricSpace& metric,
                                  const Vector& x0, double r, double t0, double t1,
                                  const SamplerConfig& config) {
  model.validate();
  if (!model.has_hessian()) {
    throw PreconditionError("certify_ball: model '" + model.name + "' has no hessian_action");
  }
  if (metric.dim() != model.dim || x0.size() != model.dim) {
    throw DimensionError("certify_ball: dimension mismatch");
  }
  if (!(r >= 0.0)) throw PreconditionError("certify_ball: radius must be >= 0");

  if (r == 0.0 || model.dim == 1) {
    ConvexityCertificate cert = base_certificate(model, x0, r, t0, t1, config);
    cert.verdict = Verdict::certified_convex;
    cert.sup_lhs = 0.0;
    Vector x = x0;
    Vector h = metric.from_euclidean_unit(Vector::Unit(model.dim, model.dim > 1 ? 1 : 0));
    if (model.dim > 1) {
      x = x0 + r * metric.from_euclidean_unit(Vector::Unit(model.dim, 0));
    }
    cert.witness = {x, h};
    cert.notes.push_back(r == 0.0 ? "singleton initial set" : "intervals map to intervals");
    return cert;
  }
  if (model.dim == 2) return certify_planar(model, metric, x0, r, t0, t1, config);
  return certify_sampled(model, metric, x0, r, t0, t1, config);
}

namespace {

enum class Side { lower, upper, abort };

Side side_of(const ConvexityCertificate& cert, std::string& why) {
  switch (cert.verdict) {
    case Verdict::certified_convex:
      return Side::lower;
    case Verdict::certified_non_convex:
      return Side::upper;
    case Verdict::inconclusive:
      break;
  }
  // Failed samples at large radii are blow-ups or domain exits.
  if (cert.samples_failed > 0) return Side::upper;
  std::ostringstream os;
  os << "inconclusive at r=" << cert.radius << " (sup_lhs=" << cert.sup_lhs << ")";
  for (const auto& note : cert.notes) os << "; " << note;
  why = os.str();
  return Side::abort;
}

}  // namespace

RadiusSearchResult numerical_radius(const VectorFieldModel& model, const MetricSpace& metric,
                                    const Vector& x0, double t0, double t1, double r_lo,
                                    double r_hi, double tol_r, const SamplerConfig& config) {
  if (!(r_lo >= 0.0 && r_hi > r_lo)) {
    throw PreconditionError("numerical_radius: need 0 <= r_lo < r_hi");
  }
  if (!(tol_r > 0.0)) throw PreconditionError("numerical_radius: tol_r must be positive");

  std::string why;
  const ConvexityCertificate lo_cert = certify_ball(model, metric, x0, r_lo, t0, t1, config);
  if (side_of(lo_cert, why) != Side::lower) {
    throw PreconditionError("numerical_radius: r_lo is not certified convex (verdict " +
                            to_string(lo_cert.verdict) + ")");
  }
  RadiusSearchResult result;
  const ConvexityCertificate hi_cert = certify_ball(model, metric, x0, r_hi, t0, t1, config);
  const Side hi_side = side_of(hi_cert, why);
  if (hi_side == Side::abort) throw ConvergenceError("numerical_radius: " + why);
  if (hi_side == Side::lower) {
    result.radius = r_hi;
    result.upper = r_hi;
    result.unbounded_within_bracket = true;
    return result;
  }

  double lo = r_lo;
  double hi = r_hi;
  while (hi - lo > tol_r) {
    const double mid = 0.5 * (lo + hi);
    const ConvexityCertificate cert = certify_ball(model, metric, x0, mid, t0, t1, config);
    ++result.iterations;
    const Side side = side_of(cert, why);
    if (side == Side::abort) result.diagnostics.push_back(why);
    (side == Side::lower ? lo : hi) = mid;
  }
  result.radius = lo;
  result.upper = hi;
  return result;
}

RadiusSearchResult numerical_radius_from_guess(const VectorFieldModel& model,
                                               const MetricSpace& metric, const Vector& x0,
                                               double t0, double t1, double r_guess, double tol_r,
                                               const SamplerConfig& config, int max_expansions) {
  if (!(r_guess > 0.0) || !std::isfinite(r_guess)) {
    throw PreconditionError("numerical_radius_from_guess: r_guess must be positive");
  }
  std::string why;
  double lo = r_guess;
  bool lo_ok = false;
  for (int k = 0; k <= max_expansions; ++k) {
    if (side_of(certify_ball(model, metric, x0, lo, t0, t1, config), why) == Side::lower) {
      lo_ok = true;
      break;
    }
    lo *= 0.5;
  }
  if (!lo_ok) throw ConvergenceError("numerical_radius_from_guess: no convex radius found");
  double hi = 2.0 * lo;
  bool hi_ok = false;
  for (int k = 0; k <= max_expansions; ++k) {
    const Side side = side_of(certify_ball(model, metric, x0, hi, t0, t1, config), why);
    if (side == Side::abort) {
      // Sitting on the threshold; step just past it.
      hi *= 1.0 + 1e-3;
      continue;
    }
    if (side == Side::upper) {
      hi_ok = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
  }
  if (!hi_ok) {
    RadiusSearchResult result;
    result.radius = lo;
    result.upper = lo;
    result.unbounded_within_bracket = true;
    return result;
  }
  return numerical_radius(model, metric, x0, t0, t1, lo, hi, tol_r, config);
}

namespace {

// Orthonormal basis of the Euclidean complement of `normal`.
Matrix kernel_basis(const Vector& normal) {
  const int n = static_cast<int>(normal.size());
  if (n == 2) {
    Matrix b(2, 1);
    b << -normal(1), normal(0);
    return b / normal.norm();
  }
  const Matrix column = normal;
  Eigen::HouseholderQR<Matrix> qr(column);
  const Matrix q = qr.householderQ();
  return q.rightCols(n - 1);
}

}  // namespace

ConvexityCertificate sublevel_image_convexity_check(const ScalarFieldC2& g, const MapC2& f,
                                                    std::span<const Vector> boundary_samples,
                                                    const SublevelCheckConfig& config) {
  if (!g.value || !g.gradient || !g.hessian || !f.jacobian || !f.hessian_action) {
    throw PreconditionError("sublevel_image_convexity_check: missing callbacks");
  }
  if (g.dim <= 0 || g.dim != f.dim) {
    throw DimensionError("sublevel_image_convexity_check: dimension mismatch");
  }
  if (boundary_samples.empty()) {
    throw PreconditionError("sublevel_image_convexity_check: no boundary samples");
  }
  const int n = g.dim;

  ConvexityCertificate cert;
  cert.criterion = "sublevel_image";
  cert.margin = config.margin;
  cert.verdict = Verdict::inconclusive;

  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const Vector& x : boundary_samples) {
    if (x.size() != n) throw DimensionError("sublevel_image_convexity_check: sample dimension");
    const Vector grad = g.gradient(x);
    const double gnorm = grad.norm();
    if (!(gnorm > config.submersion_tol)) {
      throw PreconditionError("sublevel_image_convexity_check: g'(x) vanishes at a sample");
    }
    if (std::abs(g.value(x)) > config.level_tol * std::max(1.0, x.norm() * gnorm)) {
      throw PreconditionError("sublevel_image_convexity_check: sample is not on {g = 0}");
    }
    const Matrix jac = f.jacobian(x);
    Eigen::PartialPivLU<Matrix> lu(jac);
    if (!(lu.rcond() > 1e-14)) {
      throw PreconditionError("sublevel_image_convexity_check: F'(x) is singular");
    }
    // Row covector g'(x) F'(x)^{-1}.
    const Vector row = lu.transpose().solve(grad);
    const Matrix hess = g.hessian(x);
    const Matrix basis = kernel_basis(grad);
    const int k = static_cast<int>(basis.cols());

    // Quadratic forms of both sides restricted to ker g'(x); off-diagonal
    // entries of F'' via polarization of the Hessian action.
    Matrix lhs_form(k, k), rhs_form(k, k);
    for (int i = 0; i < k; ++i) {
      const Vector bi = basis.col(i);
      lhs_form(i, i) = row.dot(f.hessian_action(x, bi));
      rhs_form(i, i) = bi.dot(hess * bi);
      for (int j = i + 1; j < k; ++j) {
        const Vector bj = basis.col(j);
        const Vector plus = f.hessian_action(x, bi + bj);
        const Vector minus = f.hessian_action(x, bi - bj);
        lhs_form(i, j) = lhs_form(j, i) = 0.25 * row.dot(plus - minus);
        rhs_form(i, j) = rhs_form(j, i) = bi.dot(hess * bj);
      }
    }
    const SymmetricEigen eig = jacobi_eigen(rhs_form - lhs_form);
    const Vector h = basis * eig.vectors.col(0);
    const double lhs = row.dot(f.hessian_action(x, h));
    const double rhs = h.dot(hess * h);
    ++cert.samples_evaluated;
    if (lhs - rhs > worst_excess) {
      worst_excess = lhs - rhs;
      cert.sup_lhs = lhs;
      cert.threshold = rhs;
      cert.witness = {x, h};
    }
  }
  cert.verdict = classify(cert.sup_lhs, cert.threshold, config.margin);
  return cert;
}

MapC2 flow_map(const VectorFieldModel& model, double t0, double t1,
               const IntegratorOptions& options) {
  MapC2 map;
  map.dim = model.dim;
  map.value = [model, t0, t1, options](const Vector& x) {
    return integrate(model, t0, x, t1, options).final_value();
  };
  map.jacobian = [model, t0, t1, options](const Vector& x) {
    return flow_bundle(model, t0, x, t1, std::nullopt, options).v_end;
  };
  map.hessian_action = [model, t0, t1, options](const Vector& x, const Vector& h) {
    return *flow_bundle(model, t0, x, t1, h, options).w_end;
  };
  return map;
}

}  // namespace convexreach
