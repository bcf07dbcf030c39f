#pragma once

#include <Eigen/Dense>

namespace convexreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point2 = Eigen::Vector2d;

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k belongs to values(k)
};

struct JacobiOptions {
  double tolerance = 1e-15;  // off-diagonal Frobenius norm relative to the full norm
  int max_sweeps = 64;
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Only the upper
/// triangle is read. Throws ConvergenceError when max_sweeps is exhausted.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, const JacobiOptions& options = {});

/// Largest singular value, sqrt(lambda_max(A^T A)).
double spectral_norm(const Matrix& a);

/// max_ij |a_ij|.
double max_abs(const Matrix& a);

}  // namespace convexreach
