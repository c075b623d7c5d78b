#include "magd/types.hpp"

#include <cmath>

namespace magd {

double distance(const Point& a, const Point& b) {
  if (a.size() != b.size()) {
    throw ConfigError("distance: dimension mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double norm(const Point& p) {
  double sum = 0.0;
  for (double c : p) sum += c * c;
  return std::sqrt(sum);
}

bool is_finite(const Point& p) {
  for (double c : p) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Continue:
      return "continue";
    case StopReason::Consensus:
      return "consensus";
    case StopReason::IterationBudget:
      return "iteration budget";
    case StopReason::Stalled:
      return "stalled";
    case StopReason::Diverged:
      return "diverged";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step_size (beta) must be positive and finite");
  }
  if (!(protocol_factor >= 0.0 && protocol_factor <= 1.0)) {
    throw ConfigError("protocol_factor (lambda) must be in [0, 1]");
  }
  if (!(precision > 0.0) || !std::isfinite(precision)) {
    throw ConfigError("precision (xi) must be positive and finite");
  }
  if (max_iterations < 1) {
    throw ConfigError("max_iterations (N) must be at least 1");
  }
  if (initial_points.empty()) {
    throw ConfigError("at least one initial point is required");
  }
  const std::size_t dim = initial_points.front().size();
  if (dim == 0) {
    throw ConfigError("initial points must have dimension >= 1");
  }
  for (std::size_t i = 0; i < initial_points.size(); ++i) {
    if (initial_points[i].size() != dim) {
      throw ConfigError("initial point " + std::to_string(i + 1) +
                        " has mismatched dimension");
    }
    if (!is_finite(initial_points[i])) {
      throw ConfigError("initial point " + std::to_string(i + 1) +
                        " has non-finite coordinates");
    }
  }
  if (step_mode == StepMode::Backtracking) {
    if (!(backtracking.initial_step > 0.0) || !std::isfinite(backtracking.initial_step)) {
      throw ConfigError("backtracking initial_step must be positive and finite");
    }
    if (!(backtracking.shrink > 0.0 && backtracking.shrink < 1.0)) {
      throw ConfigError("backtracking shrink must be in (0, 1)");
    }
    if (!(backtracking.armijo_c > 0.0 && backtracking.armijo_c < 1.0)) {
      throw ConfigError("backtracking armijo_c must be in (0, 1)");
    }
    if (backtracking.max_halvings < 1) {
      throw ConfigError("backtracking max_halvings must be at least 1");
    }
  }
  if (!(stall_tolerance >= 0.0) || !std::isfinite(stall_tolerance)) {
    throw ConfigError("stall_tolerance must be non-negative and finite");
  }
}

}  // namespace magd
