#include "convexreach/vector_field.hpp"

#include "convexreach/errors.hpp"

namespace convexreach {

bool StateBox::contains(const Vector& x) const {
  return contains<Vector>(x);
}

Vector VectorFieldModel::eval(double t, const Vector& x) const {
  Vector out(dim);
  value(t, x, out);
  return out;
}

Matrix VectorFieldModel::eval_jacobian(double t, const Vector& x) const {
  Matrix out(dim, dim);
  jacobian(t, x, out);
  return out;
}

Vector VectorFieldModel::eval_hessian_action(double t, const Vector& x, const Vector& h) const {
  if (!has_hessian()) {
    throw PreconditionError("model '" + name + "' has no hessian_action");
  }
  Vector out(dim);
  hessian_action(t, x, h, out);
  return out;
}

void VectorFieldModel::validate() const {
  if (dim <= 0) throw PreconditionError("model '" + name + "': dim must be positive");
  if (!value || !jacobian) {
    throw PreconditionError("model '" + name + "': value and jacobian callbacks are required");
  }
  if (!(lambda_minus <= lambda_plus)) {
    throw PreconditionError("model '" + name + "': lambda_minus > lambda_plus");
  }
  if (!(m2 >= 0.0)) throw PreconditionError("model '" + name + "': m2 must be >= 0");
  if (state_domain && (state_domain->lower.size() != dim || state_domain->upper.size() != dim)) {
    throw PreconditionError("model '" + name + "': state domain has the wrong dimension");
  }
}

bool VectorFieldModel::in_domain(double t, const Vector& x) const {
  if (time_domain && !time_domain->contains(t)) return false;
  if (state_domain && !state_domain->contains(x)) return false;
  return true;
}

}  // namespace convexreach
