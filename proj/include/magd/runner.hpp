#pragma once

#include "magd/objectives.hpp"
#include "magd/types.hpp"

namespace magd {

struct StopDecision {
  bool stop = false;
  StopReason reason = StopReason::Continue;  // Continue iff stop is false
};

/// Stop test for a swarm whose iteration counter was just advanced to k:
/// consensus when the maximum pairwise distance drops below xi (two or more
/// agents only — a single agent has no pairs to agree), iteration budget when
/// k > N (strict), stall when stall_tolerance > 0 and every direction norm is
/// within it. Precedence in that order. dirs may be null; the stall check is
/// then skipped.
StopDecision should_stop(const SwarmState& swarm, const DirectionSet* dirs,
                         const SolverConfig& config);

/// Runs the full loop: directions from the iteration-k snapshot, per-agent
/// step lengths, synchronous update, trace record, stop test. Deterministic:
/// identical inputs produce bit-identical results. Non-finite positions or
/// values end the run with a Diverged stop; the result then carries the trace
/// up to the last finite iteration. Invalid configs throw ConfigError before
/// iteration 0.
RunResult run(const SolverConfig& config, const Objective& obj);

/// One benchmark with the protocol/no-protocol config pair (identical except
/// protocol_factor: 0.005 vs 0).
struct ExperimentPreset {
  Objective objective;
  SolverConfig protocol;
  SolverConfig no_protocol;
};

/// Convex quadratic benchmark: three agents at (-10,20), (10,10), (30,-20),
/// beta = 0.1, fixed steps.
ExperimentPreset preset_experiment1();

/// Scaled Rosenbrock benchmark: same agents and parameters as experiment 1.
ExperimentPreset preset_experiment2();

}  // namespace magd
