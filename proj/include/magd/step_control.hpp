#pragma once

#include "magd/objectives.hpp"
#include "magd/types.hpp"

namespace magd {

/// Outcome of one per-agent line search. When fallback_used is set, the
/// searched direction was replaced by -grad f(x) because the supplied
/// direction was not a descent direction (or its search failed); halvings
/// counts the shrinks performed in the search that produced step_length.
struct StepDecision {
  double step_length = 0.0;
  bool fallback_used = false;
  int halvings = 0;
};

/// Fixed mode: every agent, every iteration, takes beta.
double fixed_step(const SolverConfig& config);

/// Armijo backtracking from params.initial_step: shrink until
///   f(x + a d) <= f(x) + c * a * <grad f(x), d>,
/// at most max_halvings times. If d is not a descent direction or the search
/// fails, retry once along -grad f(x); if that fails too, return step 0. The
/// accepted step never increases f. Throws DivergenceError if a trial
/// evaluation is non-finite.
StepDecision backtracking_step(const Point& x, const Point& direction,
                               const Objective& obj,
                               const BacktrackingParams& params);

/// Same search with f(x) and grad f(x) already evaluated.
StepDecision backtracking_step(const Point& x, const Point& direction,
                               const Objective& obj,
                               const BacktrackingParams& params,
                               double value_at_x, const Point& gradient_at_x);

/// True iff every direction norm is <= tolerance. With tolerance 0 this
/// fires only for exactly-zero directions.
bool detect_stall(const DirectionSet& dirs, double tolerance);

}  // namespace magd
