#include "convexreach/errors.hpp"

namespace convexreach {

IntegrationError::IntegrationError(Kind kind, double t, const std::string& what)
    : Error(what), kind_(kind), time_(t) {}

const char* to_string(IntegrationError::Kind kind) noexcept {
  switch (kind) {
    case IntegrationError::Kind::blow_up:
      return "blow_up";
    case IntegrationError::Kind::domain_exit:
      return "domain_exit";
    case IntegrationError::Kind::step_underflow:
      return "step_underflow";
    case IntegrationError::Kind::step_limit:
      return "step_limit";
    case IntegrationError::Kind::non_finite:
      return "non_finite";
  }
  return "unknown";
}

}  // namespace convexreach
