#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace magd {

/// A position in R^n. Dimension is fixed per run; coordinates must stay finite.
using Point = std::vector<double>;

/// Invalid parameters, mismatched dimensions, bad invocations. Raised before
/// any iteration runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A position or objective value left the finite range. Carries the offending
/// agent index when known; the runner converts this into a Diverged stop.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what,
                           std::optional<std::size_t> agent = std::nullopt)
      : std::runtime_error(what), agent_(agent) {}

  std::optional<std::size_t> agent() const { return agent_; }

 private:
  std::optional<std::size_t> agent_;
};

enum class StepMode { Fixed, Backtracking };

/// Armijo backtracking parameters. initial_step is the first trial length,
/// shrink the geometric factor applied on rejection, armijo_c the
/// sufficient-decrease constant, max_halvings the number of shrinks allowed
/// before the search gives up.
struct BacktrackingParams {
  double initial_step = 0.1;
  double shrink = 0.5;
  double armijo_c = 1e-4;
  int max_halvings = 40;

  bool operator==(const BacktrackingParams&) const = default;
};

/// Everything a run needs up front: step size beta, protocol factor lambda,
/// consensus precision xi, iteration budget N, the m initial agent positions,
/// and the step-length mode.
struct SolverConfig {
  double step_size = 0.1;        // beta
  double protocol_factor = 0.0;  // lambda, in [0, 1]
  double precision = 1e-8;       // xi
  long max_iterations = 10000;   // N; the loop stops once k > N
  std::vector<Point> initial_points;
  StepMode step_mode = StepMode::Fixed;
  BacktrackingParams backtracking;
  double stall_tolerance = 0.0;  // 0 disables stall detection

  std::size_t agent_count() const { return initial_points.size(); }
  std::size_t dimension() const {
    return initial_points.empty() ? 0 : initial_points.front().size();
  }

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

/// The m agent positions at iteration k.
struct SwarmState {
  std::vector<Point> positions;
  long iteration = 0;
};

/// One direction per agent, all computed from the same iteration snapshot.
struct DirectionSet {
  std::vector<Point> directions;
  long computed_at = 0;
};

/// Per-iteration trace entry: agent positions and values after the update,
/// the step lengths that produced them (zero for the iteration-0 entry), and
/// the swarm-level metrics.
struct IterationRecord {
  long iteration = 0;
  std::vector<Point> positions;
  std::vector<double> values;
  double best_value = 0.0;
  double max_pairwise_distance = 0.0;
  std::vector<double> step_lengths;
};

enum class StopReason { Continue, Consensus, IterationBudget, Stalled, Diverged };

std::string to_string(StopReason reason);

/// Output of a full run: the final swarm, the argmin agent (x*), the best
/// value ever seen along the trace, and the trace itself. On divergence,
/// final_swarm and the trace hold the last finite iteration and
/// diverged_agent names the first offending agent.
struct RunResult {
  SwarmState final_swarm;
  std::size_t best_agent_index = 0;  // 0-based; reports print it 1-based
  Point best_point;
  double best_value = 0.0;
  StopReason stop_reason = StopReason::Continue;
  Point best_ever_point;
  double best_ever_value = 0.0;
  std::vector<IterationRecord> trace;
  std::optional<std::size_t> diverged_agent;
};

/// Euclidean distance. Throws ConfigError on dimension mismatch.
double distance(const Point& a, const Point& b);

/// Euclidean norm.
double norm(const Point& p);

/// True iff every coordinate is finite.
bool is_finite(const Point& p);

}  // namespace magd
