#include "magd/protocol.hpp"

#include <cmath>

namespace magd {

namespace {

void require_agent(std::size_t agent, std::size_t count) {
  if (agent >= count) {
    throw ConfigError("agent index " + std::to_string(agent) + " out of range (m = " +
                      std::to_string(count) + ")");
  }
}

void require_finite_values(std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      throw DivergenceError("non-finite objective value at agent " + std::to_string(j + 1), j);
    }
  }
}

}  // namespace

Point coupling_sum(std::size_t agent, const SwarmState& swarm,
                   std::span<const double> values) {
  const auto& pos = swarm.positions;
  require_agent(agent, pos.size());
  if (values.size() != pos.size()) {
    throw ConfigError("coupling_sum: values count does not match agent count");
  }
  require_finite_values(values);

  const Point& xi = pos[agent];
  Point sum(xi.size(), 0.0);
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (j == agent) continue;
    if (pos[j].size() != xi.size()) {
      throw ConfigError("coupling_sum: agents have mismatched dimensions");
    }
    const double weight = values[j] - values[agent];
    for (std::size_t c = 0; c < xi.size(); ++c) {
      sum[c] += (pos[j][c] - xi[c]) * weight;
    }
  }
  return sum;
}

Point descent_direction(std::size_t agent, const SwarmState& swarm,
                        const Point& grad, std::span<const double> values,
                        double protocol_factor) {
  if (!(protocol_factor >= 0.0 && protocol_factor <= 1.0)) {
    throw ConfigError("protocol_factor (lambda) must be in [0, 1]");
  }
  require_agent(agent, swarm.positions.size());
  if (grad.size() != swarm.positions[agent].size()) {
    throw ConfigError("descent_direction: gradient dimension mismatch");
  }

  // d_i = -[(1 - lambda) grad_i + lambda * sum_{j != i}(x_j - x_i)(f_j - f_i)].
  // lambda = 0 short-circuits so the result is bitwise -grad_i.
  Point dir(grad.size());
  const double local_weight = 1.0 - protocol_factor;
  if (protocol_factor == 0.0) {
    for (std::size_t c = 0; c < grad.size(); ++c) {
      dir[c] = -(local_weight * grad[c]);
    }
  } else {
    const Point coupling = coupling_sum(agent, swarm, values);
    for (std::size_t c = 0; c < grad.size(); ++c) {
      dir[c] = -(local_weight * grad[c] + protocol_factor * coupling[c]);
    }
  }
  if (!is_finite(dir)) {
    throw DivergenceError("non-finite descent direction for agent " +
                          std::to_string(agent + 1), agent);
  }
  return dir;
}

DirectionSet compute_directions(const SwarmState& swarm,
                                std::span<const double> values,
                                std::span<const Point> gradients,
                                double protocol_factor) {
  const std::size_t m = swarm.positions.size();
  if (values.size() != m || gradients.size() != m) {
    throw ConfigError("compute_directions: values/gradients count does not match agent count");
  }
  DirectionSet set;
  set.computed_at = swarm.iteration;
  set.directions.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    set.directions.push_back(
        descent_direction(i, swarm, gradients[i], values, protocol_factor));
  }
  return set;
}

DirectionSet compute_directions(const SwarmState& swarm, const Objective& obj,
                                double protocol_factor) {
  const std::size_t m = swarm.positions.size();
  std::vector<double> values(m);
  std::vector<Point> gradients(m);
  for (std::size_t i = 0; i < m; ++i) {
    values[i] = obj.evaluate(swarm.positions[i]);
    gradients[i] = obj.gradient(swarm.positions[i]);
    if (!std::isfinite(values[i]) || !is_finite(gradients[i])) {
      throw DivergenceError("non-finite evaluation at agent " + std::to_string(i + 1), i);
    }
  }
  return compute_directions(swarm, values, gradients, protocol_factor);
}

SwarmState apply_step(const SwarmState& swarm, const DirectionSet& dirs,
                      std::span<const double> step_lengths) {
  const std::size_t m = swarm.positions.size();
  if (dirs.computed_at != swarm.iteration) {
    throw ConfigError("apply_step: directions were computed at iteration " +
                      std::to_string(dirs.computed_at) + ", swarm is at " +
                      std::to_string(swarm.iteration));
  }
  if (dirs.directions.size() != m || step_lengths.size() != m) {
    throw ConfigError("apply_step: direction/step count does not match agent count");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(step_lengths[i] >= 0.0) || !std::isfinite(step_lengths[i])) {
      throw ConfigError("apply_step: step length for agent " + std::to_string(i + 1) +
                        " must be finite and non-negative");
    }
  }

  SwarmState next;
  next.iteration = swarm.iteration + 1;
  next.positions.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point& x = swarm.positions[i];
    const Point& d = dirs.directions[i];
    if (d.size() != x.size()) {
      throw ConfigError("apply_step: direction dimension mismatch for agent " +
                        std::to_string(i + 1));
    }
    Point moved(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
      moved[c] = x[c] + step_lengths[i] * d[c];
    }
    if (!is_finite(moved)) {
      throw DivergenceError("agent " + std::to_string(i + 1) +
                            " moved to a non-finite position", i);
    }
    next.positions.push_back(std::move(moved));
  }
  return next;
}

double max_pairwise_distance(const SwarmState& swarm) {
  const auto& pos = swarm.positions;
  if (pos.empty()) {
    throw ConfigError("max_pairwise_distance: empty swarm");
  }
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      best = std::max(best, distance(pos[i], pos[j]));
    }
  }
  return best;
}

BestAgent select_best(const SwarmState& swarm, std::span<const double> values) {
  if (swarm.positions.empty() || values.size() != swarm.positions.size()) {
    throw ConfigError("select_best: values count does not match agent count");
  }
  require_finite_values(values);
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return {best, swarm.positions[best], values[best]};
}

BestAgent select_best(const SwarmState& swarm, const Objective& obj) {
  std::vector<double> values(swarm.positions.size());
  for (std::size_t i = 0; i < swarm.positions.size(); ++i) {
    values[i] = obj.evaluate(swarm.positions[i]);
  }
  return select_best(swarm, values);
}

}  // namespace magd
