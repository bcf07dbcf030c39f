#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "convexreach/linalg.hpp"
#include "convexreach/systems.hpp"

namespace convexreach::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_non_convex = 3,
  exit_inconclusive = 4,
  exit_refused = 5,
};

/// Invalid command-line input or configuration file (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entry point of the command-line tool. Verbs: bounds, certify, approx, sweep.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "a,b,c" or "start:stop:count". Entries accept "pi", "k*pi" and "pi/k".
/// Throws ConfigError on empty or malformed input.
std::vector<double> parse_grid(const std::string& spec);

/// "key = value" lines; '#' starts a comment. The key "preset" names the
/// preset, every other key overrides a numeric parameter.
struct ModelSpec {
  std::string preset;
  ParameterMap overrides;
};
ModelSpec parse_model_file(std::istream& in);

/// Rows of whitespace- or comma-separated numbers.
Matrix parse_metric_file(std::istream& in);

}  // namespace convexreach::cli
