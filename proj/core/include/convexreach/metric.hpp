#pragma once

#include <utility>

#include "convexreach/linalg.hpp"

namespace convexreach {

/// R^n with the inner product <x, y> = x^T Q y for a symmetric positive
/// definite weight Q. Balls in this metric are ellipsoids in Euclidean
/// coordinates. Immutable after construction; all members are thread-safe.
class MetricSpace {
 public:
  /// Euclidean metric (Q = I).
  explicit MetricSpace(int dim);

  /// Throws PreconditionError unless |Q - Q^T|_inf <= symmetry_tol * |Q|_inf
  /// and a Cholesky factorization succeeds with positive pivots.
  explicit MetricSpace(Matrix weight, double symmetry_tol = 1e-12);

  int dim() const noexcept { return dim_; }
  const Matrix& weight() const noexcept { return weight_; }
  /// Lower-triangular L with Q = L L^T.
  const Matrix& cholesky_factor() const noexcept { return chol_; }
  bool is_euclidean() const noexcept { return euclidean_; }

  double inner(const Vector& x, const Vector& y) const;
  double norm(const Vector& x) const;

  /// A* = Q^{-1} A^T Q.
  Matrix adjoint(const Matrix& a) const;

  /// Extreme eigenvalues of the self-adjoint part (A + A*)/2, i.e. the
  /// generalized problem (QA + A^T Q)/2 x = lambda Q x. Solved by Jacobi
  /// on L^{-1} (QA + A^T Q)/2 L^{-T}.
  std::pair<double, double> mu(const Matrix& a) const;
  double mu_minus(const Matrix& a) const { return mu(a).first; }
  double mu_plus(const Matrix& a) const { return mu(a).second; }

  /// Operator norm of A induced by this metric.
  double operator_norm(const Matrix& a) const;

  /// Maps Euclidean unit vectors u to metric unit vectors L^{-T} u.
  Vector from_euclidean_unit(const Vector& u) const;

 private:
  void check_vector(const Vector& x, const char* what) const;
  void check_square(const Matrix& a, const char* what) const;

  int dim_;
  Matrix weight_;
  Matrix chol_;
  bool euclidean_;
};

}  // namespace convexreach
