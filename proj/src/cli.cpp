#include "magd/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "magd/rng.hpp"

namespace magd::cli {

namespace {

// Shortest decimal form that re-parses to the same bits.
std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_point(const Point& p) {
  std::string s = "(";
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (c > 0) s += ", ";
    s += format_double(p[c]);
  }
  return s + ")";
}

std::vector<Point> parse_points(const std::string& text) {
  std::vector<Point> points;
  std::stringstream list(text);
  std::string chunk;
  while (std::getline(list, chunk, ';')) {
    Point p;
    std::stringstream coords(chunk);
    std::string field;
    while (std::getline(coords, field, ',')) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(field, &used));
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ConfigError("--points: cannot parse coordinate '" + field + "'");
      }
    }
    if (p.empty()) {
      throw ConfigError("--points: empty point in list");
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) {
    throw ConfigError("--points: no points given");
  }
  const std::size_t dim = points.front().size();
  for (const Point& p : points) {
    if (p.size() != dim) {
      throw ConfigError("--points: all points must share one dimension");
    }
  }
  return points;
}

std::string points_to_string(const std::vector<Point>& points) {
  std::string s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) s += ';';
    for (std::size_t c = 0; c < points[i].size(); ++c) {
      if (c > 0) s += ',';
      s += format_double(points[i][c]);
    }
  }
  return s;
}

struct ParseOutcome {
  CliInvocation invocation;
  bool help = false;
  std::string help_text;
};

ParseOutcome parse_args(const std::vector<std::string>& args) {
  CLI::App app{"multi-agent gradient descent with a communication protocol", "magd"};
  app.require_subcommand(1);
  CLI::App* run_cmd = app.add_subcommand("run", "execute one optimization run");

  std::string preset, objective, init, points_text, step_mode;
  std::vector<double> box;
  int agents = 0, bt_max_halvings = 0;
  std::uint64_t seed = 0;
  long max_iter = 0;
  double beta = 0, lambda = 0, xi = 0, stall_tol = 0;
  double bt_initial_step = 0, bt_shrink = 0, bt_armijo_c = 0;
  bool compare = false;
  std::string trace_path, summary_path;

  auto* opt_preset = run_cmd->add_option("--preset", preset,
                                         "built-in benchmark: exp1 (quadratic) or exp2 (rosenbrock)");
  auto* opt_objective = run_cmd->add_option("--objective", objective,
                                            "objective name: quadratic, rosenbrock, doublewell");
  auto* opt_init = run_cmd->add_option("--init", init, "initialization source: inline or random");
  auto* opt_points = run_cmd->add_option("--points", points_text,
                                         "inline initial points, e.g. \"-10,20;10,10;30,-20\"");
  auto* opt_agents = run_cmd->add_option("--agents", agents, "agent count for random init");
  auto* opt_seed = run_cmd->add_option("--seed", seed, "splitmix64 seed for random init");
  auto* opt_box = run_cmd->add_option("--box", box, "random init bounds LO HI")->expected(2);
  auto* opt_beta = run_cmd->add_option("--beta", beta, "step size (default 0.1)");
  auto* opt_lambda = run_cmd->add_option("--lambda", lambda, "protocol factor in [0,1] (default 0.005)");
  auto* opt_xi = run_cmd->add_option("--xi", xi, "consensus precision (default 1e-8)");
  auto* opt_max_iter = run_cmd->add_option("--max-iter", max_iter, "iteration budget N (default 10000)");
  auto* opt_step_mode = run_cmd->add_option("--step-mode", step_mode, "fixed or backtracking");
  auto* opt_bt_step = run_cmd->add_option("--bt-initial-step", bt_initial_step,
                                          "backtracking first trial length (default: beta)");
  auto* opt_bt_shrink = run_cmd->add_option("--bt-shrink", bt_shrink,
                                            "backtracking shrink factor (default 0.5)");
  auto* opt_bt_c = run_cmd->add_option("--bt-armijo-c", bt_armijo_c,
                                       "Armijo sufficient-decrease constant (default 1e-4)");
  auto* opt_bt_halvings = run_cmd->add_option("--bt-max-halvings", bt_max_halvings,
                                              "backtracking shrink budget (default 40)");
  auto* opt_stall = run_cmd->add_option("--stall-tol", stall_tol,
                                        "stop as stalled when every |d_i| <= this (0 disables)");
  run_cmd->add_flag("--compare", compare, "also run the lambda = 0 case side by side");
  auto* opt_trace = run_cmd->add_option("--trace", trace_path,
                                        "trace CSV path (compare mode appends .protocol / .no_protocol)");
  auto* opt_summary = run_cmd->add_option("--summary", summary_path,
                                          "summary path (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    ParseOutcome outcome;
    outcome.help = true;
    outcome.help_text = args.empty() || args.front() != "run" ? app.help() : run_cmd->help();
    return outcome;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  CliInvocation inv;
  if (opt_preset->count() > 0) {
    if (preset != "exp1" && preset != "exp2") {
      throw ConfigError("--preset must be exp1 or exp2");
    }
    inv.preset = preset;
  }
  if (opt_objective->count() > 0) inv.objective = objective;
  if (opt_init->count() > 0) {
    if (init == "inline") {
      inv.init = InitSource::Inline;
    } else if (init == "random") {
      inv.init = InitSource::Random;
    } else {
      throw ConfigError("--init must be inline or random");
    }
  }
  if (opt_points->count() > 0) inv.points = parse_points(points_text);
  if (opt_agents->count() > 0) {
    if (agents < 1) throw ConfigError("--agents must be at least 1");
    inv.agents = agents;
  }
  if (opt_seed->count() > 0) inv.seed = seed;
  if (opt_box->count() > 0) {
    if (!(box[0] < box[1])) throw ConfigError("--box requires LO < HI");
    inv.box = std::array<double, 2>{box[0], box[1]};
  }
  if (opt_beta->count() > 0) {
    if (!(beta > 0)) throw ConfigError("--beta must be positive");
    inv.beta = beta;
  }
  if (opt_lambda->count() > 0) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("--lambda must be in [0, 1]");
    inv.lambda = lambda;
  }
  if (opt_xi->count() > 0) {
    if (!(xi > 0)) throw ConfigError("--xi must be positive");
    inv.xi = xi;
  }
  if (opt_max_iter->count() > 0) {
    if (max_iter < 1) throw ConfigError("--max-iter must be at least 1");
    inv.max_iter = max_iter;
  }
  if (opt_step_mode->count() > 0) {
    if (step_mode == "fixed") {
      inv.step_mode = StepMode::Fixed;
    } else if (step_mode == "backtracking") {
      inv.step_mode = StepMode::Backtracking;
    } else {
      throw ConfigError("--step-mode must be fixed or backtracking");
    }
  }
  if (opt_bt_step->count() > 0) {
    if (!(bt_initial_step > 0)) throw ConfigError("--bt-initial-step must be positive");
    inv.bt_initial_step = bt_initial_step;
  }
  if (opt_bt_shrink->count() > 0) {
    if (!(bt_shrink > 0 && bt_shrink < 1)) throw ConfigError("--bt-shrink must be in (0, 1)");
    inv.bt_shrink = bt_shrink;
  }
  if (opt_bt_c->count() > 0) {
    if (!(bt_armijo_c > 0 && bt_armijo_c < 1)) throw ConfigError("--bt-armijo-c must be in (0, 1)");
    inv.bt_armijo_c = bt_armijo_c;
  }
  if (opt_bt_halvings->count() > 0) {
    if (bt_max_halvings < 1) throw ConfigError("--bt-max-halvings must be at least 1");
    inv.bt_max_halvings = bt_max_halvings;
  }
  if (opt_stall->count() > 0) {
    if (!(stall_tol >= 0)) throw ConfigError("--stall-tol must be non-negative");
    inv.stall_tol = stall_tol;
  }
  inv.compare = compare;
  if (opt_trace->count() > 0) inv.trace_path = trace_path;
  if (opt_summary->count() > 0) inv.summary_path = summary_path;

  // Exactly one initialization source.
  if (inv.preset) {
    if (inv.objective) throw ConfigError("--objective cannot be combined with --preset");
    if (inv.init) throw ConfigError("--init cannot be combined with --preset");
    if (!inv.points.empty()) throw ConfigError("--points cannot be combined with --preset");
    if (inv.agents || inv.seed || inv.box) {
      throw ConfigError("--agents/--seed/--box cannot be combined with --preset");
    }
  } else {
    if (!inv.objective) throw ConfigError("either --preset or --objective is required");
    if (!inv.init) throw ConfigError("--init {inline|random} is required with --objective");
    if (*inv.init == InitSource::Inline) {
      if (inv.points.empty()) throw ConfigError("--points is required with --init inline");
      if (inv.agents || inv.seed || inv.box) {
        throw ConfigError("--agents/--seed/--box apply to --init random only");
      }
    } else {
      if (!inv.seed) throw ConfigError("--seed is required with --init random");
      if (!inv.points.empty()) throw ConfigError("--points applies to --init inline only");
    }
  }

  ParseOutcome outcome;
  outcome.invocation = std::move(inv);
  return outcome;
}

}  // namespace

CliInvocation parse_invocation(const std::vector<std::string>& args) {
  ParseOutcome outcome = parse_args(args);
  if (outcome.help) {
    throw ConfigError("help requested");
  }
  return outcome.invocation;
}

std::vector<std::string> to_args(const CliInvocation& inv) {
  std::vector<std::string> args{"run"};
  auto push = [&args](const std::string& flag, const std::string& value) {
    args.push_back(flag);
    args.push_back(value);
  };
  if (inv.preset) push("--preset", *inv.preset);
  if (inv.objective) push("--objective", *inv.objective);
  if (inv.init) push("--init", *inv.init == InitSource::Inline ? "inline" : "random");
  if (!inv.points.empty()) push("--points", points_to_string(inv.points));
  if (inv.agents) push("--agents", std::to_string(*inv.agents));
  if (inv.seed) push("--seed", std::to_string(*inv.seed));
  if (inv.box) {
    args.push_back("--box");
    args.push_back(format_double((*inv.box)[0]));
    args.push_back(format_double((*inv.box)[1]));
  }
  if (inv.beta) push("--beta", format_double(*inv.beta));
  if (inv.lambda) push("--lambda", format_double(*inv.lambda));
  if (inv.xi) push("--xi", format_double(*inv.xi));
  if (inv.max_iter) push("--max-iter", std::to_string(*inv.max_iter));
  if (inv.step_mode) {
    push("--step-mode", *inv.step_mode == StepMode::Fixed ? "fixed" : "backtracking");
  }
  if (inv.bt_initial_step) push("--bt-initial-step", format_double(*inv.bt_initial_step));
  if (inv.bt_shrink) push("--bt-shrink", format_double(*inv.bt_shrink));
  if (inv.bt_armijo_c) push("--bt-armijo-c", format_double(*inv.bt_armijo_c));
  if (inv.bt_max_halvings) push("--bt-max-halvings", std::to_string(*inv.bt_max_halvings));
  if (inv.stall_tol) push("--stall-tol", format_double(*inv.stall_tol));
  if (inv.compare) args.push_back("--compare");
  if (inv.trace_path) push("--trace", *inv.trace_path);
  if (inv.summary_path) push("--summary", *inv.summary_path);
  return args;
}

std::vector<Point> random_box_points(std::uint64_t seed, std::size_t count,
                                     std::size_t dimension, double lo, double hi) {
  if (count == 0 || dimension == 0) {
    throw ConfigError("random_box_points: count and dimension must be positive");
  }
  if (!(lo < hi)) {
    throw ConfigError("random_box_points: requires lo < hi");
  }
  SplitMix64 rng(seed);
  std::vector<Point> points(count);
  for (Point& p : points) {
    p.resize(dimension);
    for (double& c : p) c = rng.next_in(lo, hi);
  }
  return points;
}

ResolvedRun resolve(const CliInvocation& inv) {
  ResolvedRun resolved;
  if (inv.preset) {
    ExperimentPreset preset =
        *inv.preset == "exp1" ? preset_experiment1() : preset_experiment2();
    resolved.objective = std::move(preset.objective);
    resolved.config = std::move(preset.protocol);
  } else {
    resolved.objective = objective_by_name(*inv.objective);
    resolved.config = SolverConfig{};
    resolved.config.protocol_factor = 0.005;
    if (*inv.init == InitSource::Inline) {
      resolved.config.initial_points = inv.points;
    } else {
      const auto box = inv.box.value_or(std::array<double, 2>{-30.0, 30.0});
      resolved.config.initial_points =
          random_box_points(*inv.seed, inv.agents.value_or(3),
                            resolved.objective.dimension, box[0], box[1]);
    }
  }

  SolverConfig& cfg = resolved.config;
  if (inv.beta) cfg.step_size = *inv.beta;
  if (inv.lambda) cfg.protocol_factor = *inv.lambda;
  if (inv.xi) cfg.precision = *inv.xi;
  if (inv.max_iter) cfg.max_iterations = *inv.max_iter;
  if (inv.step_mode) cfg.step_mode = *inv.step_mode;
  cfg.backtracking.initial_step = inv.bt_initial_step.value_or(cfg.step_size);
  if (inv.bt_shrink) cfg.backtracking.shrink = *inv.bt_shrink;
  if (inv.bt_armijo_c) cfg.backtracking.armijo_c = *inv.bt_armijo_c;
  if (inv.bt_max_halvings) cfg.backtracking.max_halvings = *inv.bt_max_halvings;
  if (inv.stall_tol) cfg.stall_tolerance = *inv.stall_tol;

  if (cfg.dimension() != resolved.objective.dimension) {
    throw ConfigError("--points dimension " + std::to_string(cfg.dimension()) +
                      " does not match objective '" + resolved.objective.name +
                      "' (dimension " + std::to_string(resolved.objective.dimension) + ")");
  }
  cfg.validate();
  return resolved;
}

void write_trace_csv(const RunResult& result, std::ostream& os) {
  if (result.trace.empty()) {
    throw ConfigError("write_trace_csv: empty trace");
  }
  const std::size_t dim = result.trace.front().positions.front().size();
  os << "iter,agent";
  for (std::size_t c = 0; c < dim; ++c) os << ",x" << c;
  os << ",f,step,best_f,max_dist\n";
  for (const IterationRecord& rec : result.trace) {
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      os << rec.iteration << ',' << (i + 1);
      for (std::size_t c = 0; c < dim; ++c) os << ',' << format_double(rec.positions[i][c]);
      os << ',' << format_double(rec.values[i]);
      os << ',' << format_double(rec.step_lengths[i]);
      os << ',' << format_double(rec.best_value);
      os << ',' << format_double(rec.max_pairwise_distance);
      os << '\n';
    }
  }
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw ConfigError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  }
  return os;
}

void check_write(const std::ostream& os, const std::string& path) {
  if (!os) {
    throw ConfigError("write to '" + path + "' failed: " + std::strerror(errno));
  }
}

}  // namespace

void write_trace_csv(const RunResult& result, const std::string& path) {
  std::ofstream os = open_output(path);
  write_trace_csv(result, os);
  os.flush();
  check_write(os, path);
}

std::optional<long> iterations_to_threshold(const RunResult& result, double threshold) {
  for (const IterationRecord& rec : result.trace) {
    if (rec.best_value <= threshold) return rec.iteration;
  }
  return std::nullopt;
}

void write_summary(const std::vector<LabeledRun>& runs, std::ostream& os) {
  if (runs.empty()) {
    throw ConfigError("write_summary: no runs");
  }

  auto row = [&runs](const std::string& name,
                     auto&& cell) -> std::vector<std::string> {
    std::vector<std::string> cells{name};
    for (const LabeledRun& r : runs) cells.push_back(cell(r.result));
    return cells;
  };

  std::vector<std::vector<std::string>> rows;
  {
    std::vector<std::string> header{""};
    for (const LabeledRun& r : runs) header.push_back(r.label);
    rows.push_back(std::move(header));
  }
  rows.push_back(row("stop reason", [](const RunResult& r) { return to_string(r.stop_reason); }));
  rows.push_back(row("iterations", [](const RunResult& r) {
    return std::to_string(r.trace.empty() ? 0 : r.trace.back().iteration);
  }));
  rows.push_back(row("best agent", [](const RunResult& r) {
    return r.trace.empty() ? std::string("-") : std::to_string(r.best_agent_index + 1);
  }));
  rows.push_back(row("f(x*)", [](const RunResult& r) {
    return r.trace.empty() ? std::string("-") : format_double(r.best_value);
  }));
  rows.push_back(row("best-ever f", [](const RunResult& r) {
    return r.trace.empty() ? std::string("-") : format_double(r.best_ever_value);
  }));
  rows.push_back(row("iters to f<=" + format_double(kSummaryThreshold),
                     [](const RunResult& r) {
                       const auto k = iterations_to_threshold(r, kSummaryThreshold);
                       return k ? std::to_string(*k) : std::string("never");
                     }));
  rows.push_back(row("x*", [](const RunResult& r) {
    return r.trace.empty() ? std::string("-") : format_point(r.best_point);
  }));

  const bool any_diverged =
      std::any_of(runs.begin(), runs.end(), [](const LabeledRun& r) {
        return r.result.stop_reason == StopReason::Diverged;
      });
  if (any_diverged) {
    rows.push_back(row("diverged agent", [](const RunResult& r) {
      return r.diverged_agent ? std::to_string(*r.diverged_agent + 1) : std::string("-");
    }));
    rows.push_back(row("last finite iter", [](const RunResult& r) {
      if (r.stop_reason != StopReason::Diverged) return std::string("-");
      return r.trace.empty() ? std::string("none") : std::to_string(r.trace.back().iteration);
    }));
  }

  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& cells : rows) {
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      widths[c] = std::max(widths[c], cells[c].size());
    }
  }
  for (const auto& cells : rows) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c + 1 < cells.size()) {
        line += cells[c];
        line.append(widths[c] - cells[c].size() + 2, ' ');
      } else {
        line += cells[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
}

void write_summary(const std::vector<LabeledRun>& runs, const std::string& path) {
  std::ofstream os = open_output(path);
  write_summary(runs, os);
  os.flush();
  check_write(os, path);
}

namespace {

// out.csv -> out.protocol.csv / out.no_protocol.csv in compare mode.
std::string labeled_path(const std::string& path, std::string label) {
  std::replace(label.begin(), label.end(), ' ', '_');
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + "." + label;
  }
  return path.substr(0, dot) + "." + label + path.substr(dot);
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  ParseOutcome outcome;
  try {
    outcome = parse_args(args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    err << "see 'magd run --help'\n";
    return 1;
  }
  if (outcome.help) {
    out << outcome.help_text;
    return 0;
  }
  const CliInvocation& inv = outcome.invocation;

  try {
    ResolvedRun resolved = resolve(inv);
    std::vector<LabeledRun> runs;
    if (inv.compare) {
      SolverConfig no_protocol = resolved.config;
      no_protocol.protocol_factor = 0.0;
      runs.push_back({"protocol", run(resolved.config, resolved.objective)});
      runs.push_back({"no protocol", run(no_protocol, resolved.objective)});
    } else {
      runs.push_back({"run", run(resolved.config, resolved.objective)});
    }

    if (inv.trace_path) {
      for (const LabeledRun& lr : runs) {
        const std::string path = runs.size() == 1
                                     ? *inv.trace_path
                                     : labeled_path(*inv.trace_path, lr.label);
        if (lr.result.trace.empty()) {
          err << "warning: no finite iterations to trace for '" << lr.label << "'\n";
          continue;
        }
        write_trace_csv(lr.result, path);
      }
    }
    if (inv.summary_path) {
      write_summary(runs, *inv.summary_path);
    } else {
      write_summary(runs, out);
    }

    const bool any_diverged =
        std::any_of(runs.begin(), runs.end(), [](const LabeledRun& r) {
          return r.result.stop_reason == StopReason::Diverged;
        });
    return any_diverged ? 2 : 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace magd::cli
