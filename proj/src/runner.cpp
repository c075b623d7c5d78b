#include "magd/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "magd/protocol.hpp"
#include "magd/step_control.hpp"

namespace magd {

StopDecision should_stop(const SwarmState& swarm, const DirectionSet* dirs,
                         const SolverConfig& config) {
  if (swarm.positions.size() > 1 &&
      max_pairwise_distance(swarm) < config.precision) {
    return {true, StopReason::Consensus};
  }
  if (swarm.iteration > config.max_iterations) {
    return {true, StopReason::IterationBudget};
  }
  if (config.stall_tolerance > 0.0 && dirs != nullptr &&
      detect_stall(*dirs, config.stall_tolerance)) {
    return {true, StopReason::Stalled};
  }
  return {false, StopReason::Continue};
}

namespace {

std::vector<double> evaluate_swarm(const SwarmState& swarm, const Objective& obj) {
  std::vector<double> values(swarm.positions.size());
  for (std::size_t i = 0; i < swarm.positions.size(); ++i) {
    values[i] = obj.evaluate(swarm.positions[i]);
    if (!std::isfinite(values[i])) {
      throw DivergenceError("objective value diverged at agent " + std::to_string(i + 1), i);
    }
  }
  return values;
}

IterationRecord make_record(const SwarmState& swarm, const std::vector<double>& values,
                            std::vector<double> step_lengths) {
  IterationRecord rec;
  rec.iteration = swarm.iteration;
  rec.positions = swarm.positions;
  rec.values = values;
  rec.best_value = *std::min_element(values.begin(), values.end());
  rec.max_pairwise_distance = max_pairwise_distance(swarm);
  rec.step_lengths = std::move(step_lengths);
  return rec;
}

}  // namespace

RunResult run(const SolverConfig& config, const Objective& obj) {
  config.validate();
  if (config.dimension() != obj.dimension) {
    throw ConfigError("initial points have dimension " +
                      std::to_string(config.dimension()) + " but objective '" +
                      obj.name + "' expects " + std::to_string(obj.dimension));
  }

  const std::size_t m = config.agent_count();
  RunResult result;
  SwarmState swarm{config.initial_points, 0};
  std::vector<double> values;

  try {
    values = evaluate_swarm(swarm, obj);
  } catch (const DivergenceError& e) {
    // Diverged before any finite state could be recorded.
    result.final_swarm = std::move(swarm);
    result.stop_reason = StopReason::Diverged;
    result.diverged_agent = e.agent();
    result.best_value = std::numeric_limits<double>::quiet_NaN();
    result.best_ever_value = result.best_value;
    return result;
  }

  result.trace.push_back(make_record(swarm, values, std::vector<double>(m, 0.0)));
  result.best_ever_value = result.trace.front().best_value;
  {
    const auto first_best = select_best(swarm, values);
    result.best_ever_point = first_best.point;
  }

  StopReason reason = StopReason::Continue;
  while (true) {
    DirectionSet dirs;
    try {
      std::vector<Point> gradients(m);
      for (std::size_t i = 0; i < m; ++i) {
        gradients[i] = obj.gradient(swarm.positions[i]);
        if (!is_finite(gradients[i])) {
          throw DivergenceError("gradient diverged at agent " + std::to_string(i + 1), i);
        }
      }
      dirs = compute_directions(swarm, values, gradients, config.protocol_factor);

      std::vector<double> step_lengths(m);
      DirectionSet effective = dirs;
      if (config.step_mode == StepMode::Fixed) {
        std::fill(step_lengths.begin(), step_lengths.end(), fixed_step(config));
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          const StepDecision decision =
              backtracking_step(swarm.positions[i], dirs.directions[i], obj,
                                config.backtracking, values[i], gradients[i]);
          step_lengths[i] = decision.step_length;
          if (decision.fallback_used) {
            Point steepest(gradients[i].size());
            for (std::size_t c = 0; c < steepest.size(); ++c) {
              steepest[c] = -gradients[i][c];
            }
            effective.directions[i] = std::move(steepest);
          }
        }
      }

      SwarmState next = apply_step(swarm, effective, step_lengths);
      std::vector<double> next_values = evaluate_swarm(next, obj);
      swarm = std::move(next);
      values = std::move(next_values);
      result.trace.push_back(make_record(swarm, values, std::move(step_lengths)));
    } catch (const DivergenceError& e) {
      reason = StopReason::Diverged;
      result.diverged_agent = e.agent();
      break;
    }

    const IterationRecord& rec = result.trace.back();
    if (rec.best_value < result.best_ever_value) {
      result.best_ever_value = rec.best_value;
      result.best_ever_point = select_best(swarm, values).point;
    }

    // Stall detection looks at the blended directions, not any fallback
    // replacements: the swarm is stuck only when the protocol itself is.
    const StopDecision decision = should_stop(swarm, &dirs, config);
    if (decision.stop) {
      reason = decision.reason;
      break;
    }
  }

  const BestAgent best = select_best(swarm, values);
  result.final_swarm = std::move(swarm);
  result.best_agent_index = best.index;
  result.best_point = best.point;
  result.best_value = best.value;
  result.stop_reason = reason;
  return result;
}

namespace {

ExperimentPreset make_preset(Objective objective) {
  SolverConfig base;
  base.step_size = 0.1;
  base.protocol_factor = 0.005;
  base.precision = 1e-8;
  base.max_iterations = 10000;
  base.initial_points = {{-10.0, 20.0}, {10.0, 10.0}, {30.0, -20.0}};
  base.step_mode = StepMode::Fixed;
  base.backtracking.initial_step = base.step_size;

  ExperimentPreset preset;
  preset.objective = std::move(objective);
  preset.protocol = base;
  preset.no_protocol = base;
  preset.no_protocol.protocol_factor = 0.0;
  return preset;
}

}  // namespace

ExperimentPreset preset_experiment1() { return make_preset(quadratic_objective()); }

ExperimentPreset preset_experiment2() { return make_preset(rosenbrock_objective()); }

}  // namespace magd
