#include "magd/step_control.hpp"

#include <cmath>
#include <optional>

namespace magd {

namespace {

double inner(const Point& a, const Point& b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) sum += a[c] * b[c];
  return sum;
}

// Geometric sweep a = initial_step * shrink^h, h = 0..max_halvings; accepts
// the first a satisfying the Armijo test. Returns nullopt when none does.
std::optional<StepDecision> armijo_search(const Point& x, const Point& d,
                                          const Objective& obj,
                                          const BacktrackingParams& params,
                                          double fx, double slope) {
  Point trial(x.size());
  double a = params.initial_step;
  for (int h = 0; h <= params.max_halvings; ++h) {
    for (std::size_t c = 0; c < x.size(); ++c) trial[c] = x[c] + a * d[c];
    const double ft = obj.evaluate(trial);
    if (!std::isfinite(ft)) {
      throw DivergenceError("backtracking trial evaluation is non-finite");
    }
    if (ft <= fx + params.armijo_c * a * slope) {
      return StepDecision{a, false, h};
    }
    a *= params.shrink;
  }
  return std::nullopt;
}

}  // namespace

double fixed_step(const SolverConfig& config) {
  if (!(config.step_size > 0.0)) {
    throw ConfigError("fixed_step: step_size must be positive");
  }
  return config.step_size;
}

StepDecision backtracking_step(const Point& x, const Point& direction,
                               const Objective& obj,
                               const BacktrackingParams& params,
                               double value_at_x, const Point& gradient_at_x) {
  if (x.size() != direction.size() || x.size() != gradient_at_x.size()) {
    throw ConfigError("backtracking_step: dimension mismatch");
  }
  if (!std::isfinite(value_at_x) || !is_finite(gradient_at_x) || !is_finite(x) ||
      !is_finite(direction)) {
    throw DivergenceError("backtracking_step: non-finite input");
  }

  const double slope = inner(gradient_at_x, direction);
  if (slope < 0.0) {
    if (auto hit = armijo_search(x, direction, obj, params, value_at_x, slope)) {
      return *hit;
    }
  }

  // Not a descent direction, or the search ran dry: one retry along -grad.
  const double grad_slope = -inner(gradient_at_x, gradient_at_x);
  if (!(grad_slope < 0.0)) {
    return {0.0, true, 0};  // critical point, nothing decreases f to first order
  }
  Point steepest(gradient_at_x.size());
  for (std::size_t c = 0; c < steepest.size(); ++c) steepest[c] = -gradient_at_x[c];
  if (auto hit = armijo_search(x, steepest, obj, params, value_at_x, grad_slope)) {
    hit->fallback_used = true;
    return *hit;
  }
  return {0.0, true, params.max_halvings};
}

StepDecision backtracking_step(const Point& x, const Point& direction,
                               const Objective& obj,
                               const BacktrackingParams& params) {
  const double fx = obj.evaluate(x);
  if (!std::isfinite(fx)) {
    throw DivergenceError("backtracking_step: non-finite value at base point");
  }
  return backtracking_step(x, direction, obj, params, fx, obj.gradient(x));
}

bool detect_stall(const DirectionSet& dirs, double tolerance) {
  if (!(tolerance >= 0.0)) {
    throw ConfigError("detect_stall: tolerance must be non-negative");
  }
  for (const Point& d : dirs.directions) {
    if (norm(d) > tolerance) return false;
  }
  return true;
}

}  // namespace magd
