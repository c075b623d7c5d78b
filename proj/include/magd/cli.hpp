#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "magd/objectives.hpp"
#include "magd/runner.hpp"
#include "magd/types.hpp"

namespace magd::cli {

enum class InitSource { Preset, Inline, Random };

/// A parsed `run` invocation. Optionals hold only the flags the user gave;
/// resolve() turns them into an objective plus a validated SolverConfig.
struct CliInvocation {
  std::optional<std::string> preset;     // "exp1" | "exp2"
  std::optional<std::string> objective;  // by name, when no preset
  std::optional<InitSource> init;
  std::vector<Point> points;             // inline init
  std::optional<int> agents;             // random init
  std::optional<std::uint64_t> seed;     // random init (required there)
  std::optional<std::array<double, 2>> box;

  std::optional<double> beta;
  std::optional<double> lambda;
  std::optional<double> xi;
  std::optional<long> max_iter;
  std::optional<StepMode> step_mode;
  std::optional<double> bt_initial_step;
  std::optional<double> bt_shrink;
  std::optional<double> bt_armijo_c;
  std::optional<int> bt_max_halvings;
  std::optional<double> stall_tol;

  bool compare = false;
  std::optional<std::string> trace_path;
  std::optional<std::string> summary_path;

  bool operator==(const CliInvocation&) const = default;
};

/// Parses `run ...` arguments (no binary name). Throws ConfigError with a
/// message naming the offending flag; unknown flags are rejected.
CliInvocation parse_invocation(const std::vector<std::string>& args);

/// Canonical flag list that parses back to the same invocation.
std::vector<std::string> to_args(const CliInvocation& invocation);

/// Objective + config pair an invocation resolves to. In compare mode the
/// runner executes `config` and a clone with protocol_factor = 0.
struct ResolvedRun {
  Objective objective;
  SolverConfig config;
};

ResolvedRun resolve(const CliInvocation& invocation);

/// `count` points sampled uniformly from [lo, hi)^dimension with splitmix64;
/// agent-major order (all coordinates of agent 1, then agent 2, ...).
std::vector<Point> random_box_points(std::uint64_t seed, std::size_t count,
                                     std::size_t dimension, double lo, double hi);

/// Trace CSV, header `iter,agent,x0,x1,f,step,best_f,max_dist` (coordinate
/// columns extend to x{n-1} for dimension n). One row per (iteration, agent),
/// agents 1-based, doubles in shortest round-trip form. Rewriting the same
/// result yields a byte-identical file. Throws ConfigError on an empty trace.
void write_trace_csv(const RunResult& result, std::ostream& os);
void write_trace_csv(const RunResult& result, const std::string& path);

struct LabeledRun {
  std::string label;
  RunResult result;
};

/// Threshold used by summaries for the iterations-to-reach line.
inline constexpr double kSummaryThreshold = 1e-6;

/// Human-readable report: stop reason, iterations, x*, f(x*), best-ever
/// value, iterations to reach kSummaryThreshold. Two runs are shown as
/// side-by-side columns; a diverged run names the failing agent and the last
/// finite iteration.
void write_summary(const std::vector<LabeledRun>& runs, std::ostream& os);
void write_summary(const std::vector<LabeledRun>& runs, const std::string& path);

/// First recorded iteration whose per-iteration best value is <= threshold,
/// or nullopt if the trace never gets there.
std::optional<long> iterations_to_threshold(const RunResult& result, double threshold);

/// Full CLI entry point (args exclude the binary name). Returns the process
/// exit code: 0 on success, 1 on usage/config errors, 2 when a run diverged.
int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace magd::cli
