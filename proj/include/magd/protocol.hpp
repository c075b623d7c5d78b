#pragma once

#include <span>

#include "magd/objectives.hpp"
#include "magd/types.hpp"

namespace magd {

/// Pairwise coupling term for one agent, without the lambda weight:
///   sum_{j != i} (x_j - x_i) * (f(x_j) - f(x_i))
/// values[j] must hold f(positions[j]). Summed in ascending j order so the
/// result is bit-reproducible. Throws DivergenceError on non-finite values.
Point coupling_sum(std::size_t agent, const SwarmState& swarm,
                   std::span<const double> values);

/// Blended descent direction for one agent:
///   d_i = -[(1 - lambda) * grad_i + lambda * coupling_sum(i)]
/// With lambda = 0 the coupling is skipped entirely and the result is exactly
/// -grad_i. Throws DivergenceError if the result is non-finite.
Point descent_direction(std::size_t agent, const SwarmState& swarm,
                        const Point& grad, std::span<const double> values,
                        double protocol_factor);

/// Directions for every agent from one swarm snapshot; evaluates f and grad f
/// once per agent.
DirectionSet compute_directions(const SwarmState& swarm, const Objective& obj,
                                double protocol_factor);

/// Same, with values and gradients already evaluated for this snapshot.
DirectionSet compute_directions(const SwarmState& swarm,
                                std::span<const double> values,
                                std::span<const Point> gradients,
                                double protocol_factor);

/// Synchronous update: x_i + step_lengths[i] * d_i for every agent, iteration
/// counter advanced by one. The input swarm is left untouched. Throws
/// DivergenceError (with agent index) if a new position is non-finite.
SwarmState apply_step(const SwarmState& swarm, const DirectionSet& dirs,
                      std::span<const double> step_lengths);

/// Maximum Euclidean distance over unordered agent pairs; 0 for a single
/// agent.
double max_pairwise_distance(const SwarmState& swarm);

struct BestAgent {
  std::size_t index = 0;  // 0-based
  Point point;
  double value = 0.0;
};

/// Agent with minimal objective value; ties break toward the lowest index.
BestAgent select_best(const SwarmState& swarm, const Objective& obj);
BestAgent select_best(const SwarmState& swarm, std::span<const double> values);

}  // namespace magd
