#include "convexreach/metric.hpp"

#include <cmath>
#include <string>

#include "convexreach/errors.hpp"

namespace convexreach {

MetricSpace::MetricSpace(int dim)
    : dim_(dim),
      weight_(Matrix::Identity(dim, dim)),
      chol_(Matrix::Identity(dim, dim)),
      euclidean_(true) {
  if (dim <= 0) throw PreconditionError("MetricSpace: dimension must be positive");
}

MetricSpace::MetricSpace(Matrix weight, double symmetry_tol)
    : dim_(static_cast<int>(weight.rows())), weight_(std::move(weight)), euclidean_(false) {
  if (weight_.rows() == 0 || weight_.rows() != weight_.cols()) {
    throw PreconditionError("MetricSpace: weight must be a non-empty square matrix");
  }
  if (!weight_.allFinite()) throw PreconditionError("MetricSpace: weight has non-finite entries");
  // Infinity norm = max absolute row sum.
  const double qnorm = weight_.cwiseAbs().rowwise().sum().maxCoeff();
  const double asym = (weight_ - weight_.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  if (asym > symmetry_tol * qnorm) {
    throw PreconditionError("MetricSpace: weight is not symmetric");
  }
  weight_ = 0.5 * (weight_ + weight_.transpose());

  Eigen::LLT<Matrix> llt(weight_);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("MetricSpace: weight is not positive definite");
  }
  chol_ = llt.matrixL();
  for (int i = 0; i < dim_; ++i) {
    if (!(chol_(i, i) > 0.0)) throw PreconditionError("MetricSpace: non-positive Cholesky pivot");
  }
  euclidean_ = weight_.isIdentity(0.0);
}

void MetricSpace::check_vector(const Vector& x, const char* what) const {
  if (x.size() != dim_) {
    throw DimensionError(std::string(what) + ": vector has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(dim_));
  }
}

void MetricSpace::check_square(const Matrix& a, const char* what) const {
  if (a.rows() != dim_ || a.cols() != dim_) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected " + std::to_string(dim_) + "x" +
                         std::to_string(dim_));
  }
}

double MetricSpace::inner(const Vector& x, const Vector& y) const {
  check_vector(x, "inner");
  check_vector(y, "inner");
  if (euclidean_) return x.dot(y);
  return x.dot(weight_ * y);
}

double MetricSpace::norm(const Vector& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

Matrix MetricSpace::adjoint(const Matrix& a) const {
  check_square(a, "adjoint");
  if (euclidean_) return a.transpose();
  const Matrix rhs = a.transpose() * weight_;
  const auto lower = chol_.triangularView<Eigen::Lower>();
  return lower.transpose().solve(lower.solve(rhs));
}

std::pair<double, double> MetricSpace::mu(const Matrix& a) const {
  check_square(a, "mu");
  Matrix sym;
  if (euclidean_) {
    sym = 0.5 * (a + a.transpose());
  } else {
    const Matrix s = 0.5 * (weight_ * a + a.transpose() * weight_);
    const auto lower = chol_.triangularView<Eigen::Lower>();
    // L^{-1} S L^{-T}
    const Matrix left = lower.solve(s);
    sym = lower.solve(left.transpose()).transpose();
    sym = 0.5 * (sym + sym.transpose());
  }
  if (dim_ == 1) return {sym(0, 0), sym(0, 0)};
  const SymmetricEigen eig = jacobi_eigen(sym);
  return {eig.values(0), eig.values(dim_ - 1)};
}

double MetricSpace::operator_norm(const Matrix& a) const {
  check_square(a, "operator_norm");
  if (euclidean_) return spectral_norm(a);
  // ||A||_Q = ||L^T A L^{-T}||_2
  const auto lower = chol_.triangularView<Eigen::Lower>();
  const Matrix la = chol_.transpose() * a;
  const Matrix m = lower.solve(la.transpose()).transpose();
  return spectral_norm(m);
}

Vector MetricSpace::from_euclidean_unit(const Vector& u) const {
  check_vector(u, "from_euclidean_unit");
  if (euclidean_) return u;
  return chol_.transpose().triangularView<Eigen::Upper>().solve(u);
}

}  // namespace convexreach
