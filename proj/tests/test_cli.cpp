#include "magd/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "magd/rng.hpp"

using namespace magd;
using namespace magd::cli;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

RunResult experiment1_protocol_run() {
  ExperimentPreset preset = preset_experiment1();
  return run(preset.protocol, preset.objective);
}

}  // namespace

TEST(ParseInvocation, PresetCompareTrace) {
  const CliInvocation inv =
      parse_invocation({"run", "--preset", "exp1", "--compare", "--trace", "out.csv"});
  ASSERT_TRUE(inv.preset.has_value());
  EXPECT_EQ(*inv.preset, "exp1");
  EXPECT_TRUE(inv.compare);
  ASSERT_TRUE(inv.trace_path.has_value());
  EXPECT_EQ(*inv.trace_path, "out.csv");

  const ResolvedRun resolved = resolve(inv);
  EXPECT_EQ(resolved.objective.name, "quadratic");
  EXPECT_EQ(resolved.config.protocol_factor, 0.005);
  EXPECT_EQ(resolved.config.initial_points,
            (std::vector<Point>{{-10, 20}, {10, 10}, {30, -20}}));
}

TEST(ParseInvocation, LambdaOutOfRangeNamesTheFlag) {
  try {
    parse_invocation({"run", "--objective", "quadratic", "--init", "random",
                      "--seed", "1", "--lambda", "1.5"});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("--lambda"), std::string::npos);
  }
}

TEST(ParseInvocation, UnknownFlagRejected) {
  EXPECT_THROW(parse_invocation({"run", "--preset", "exp1", "--frobnicate"}), ConfigError);
}

TEST(ParseInvocation, RandomInitRequiresSeed) {
  EXPECT_THROW(parse_invocation({"run", "--objective", "doublewell", "--init", "random"}),
               ConfigError);
}

TEST(ParseInvocation, ExactlyOneInitializationSource) {
  EXPECT_THROW(parse_invocation({"run", "--preset", "exp1", "--objective", "quadratic"}),
               ConfigError);
  EXPECT_THROW(parse_invocation({"run", "--objective", "quadratic"}), ConfigError);
  EXPECT_THROW(parse_invocation({"run", "--objective", "quadratic", "--init", "inline"}),
               ConfigError);
  EXPECT_THROW(parse_invocation({"run", "--preset", "exp1", "--seed", "3"}), ConfigError);
}

TEST(ParseInvocation, InlinePointsParsed) {
  const CliInvocation inv = parse_invocation(
      {"run", "--objective", "quadratic", "--init", "inline", "--points", "-10,20;10,10"});
  EXPECT_EQ(inv.points, (std::vector<Point>{{-10, 20}, {10, 10}}));
}

TEST(ParseInvocation, MalformedPointsRejected) {
  EXPECT_THROW(parse_invocation({"run", "--objective", "quadratic", "--init", "inline",
                                 "--points", "1,2;3,banana"}),
               ConfigError);
  EXPECT_THROW(parse_invocation({"run", "--objective", "quadratic", "--init", "inline",
                                 "--points", "1,2;3"}),
               ConfigError);
}

TEST(Resolve, InlineDimensionMustMatchObjective) {
  const CliInvocation inv = parse_invocation({"run", "--objective", "quadratic", "--init",
                                              "inline", "--points", "1,2,3;4,5,6"});
  EXPECT_THROW(resolve(inv), ConfigError);
}

TEST(Resolve, RandomInitIsSeedReproducible) {
  const std::vector<std::string> args{"run",     "--objective", "doublewell", "--init",
                                      "random",  "--agents",    "5",          "--seed",
                                      "42",      "--box",       "-3",         "3"};
  const ResolvedRun a = resolve(parse_invocation(args));
  const ResolvedRun b = resolve(parse_invocation(args));
  EXPECT_EQ(a.config.initial_points, b.config.initial_points);
  EXPECT_EQ(a.config.initial_points.size(), 5u);
  for (const Point& p : a.config.initial_points) {
    ASSERT_EQ(p.size(), 2u);
    EXPECT_GE(p[0], -3.0);
    EXPECT_LT(p[0], 3.0);
    EXPECT_GE(p[1], -3.0);
    EXPECT_LT(p[1], 3.0);
  }

  auto different = args;
  different[8] = "43";  // new seed
  EXPECT_NE(resolve(parse_invocation(different)).config.initial_points,
            a.config.initial_points);
}

TEST(Resolve, BacktrackingInitialStepFollowsBeta) {
  const CliInvocation inv = parse_invocation({"run", "--preset", "exp1", "--beta", "0.25",
                                              "--step-mode", "backtracking"});
  const ResolvedRun resolved = resolve(inv);
  EXPECT_EQ(resolved.config.backtracking.initial_step, 0.25);

  const CliInvocation explicit_step = parse_invocation(
      {"run", "--preset", "exp1", "--beta", "0.25", "--step-mode", "backtracking",
       "--bt-initial-step", "5"});
  EXPECT_EQ(resolve(explicit_step).config.backtracking.initial_step, 5.0);
}

TEST(RoundTrip, ParseOfToArgsIsIdentity) {
  std::vector<CliInvocation> cases;
  {
    CliInvocation inv;
    inv.preset = "exp2";
    inv.compare = true;
    inv.trace_path = "trace.csv";
    cases.push_back(inv);
  }
  {
    CliInvocation inv;
    inv.objective = "doublewell";
    inv.init = InitSource::Random;
    inv.agents = 7;
    inv.seed = 123456789ULL;
    inv.box = std::array<double, 2>{-2.5, 2.5};
    inv.beta = 0.05;
    inv.lambda = 0.125;
    inv.xi = 1e-9;
    inv.max_iter = 321;
    inv.step_mode = StepMode::Backtracking;
    inv.bt_initial_step = 5.0;
    inv.bt_shrink = 0.25;
    inv.bt_armijo_c = 0.001;
    inv.bt_max_halvings = 17;
    inv.stall_tol = 1e-10;
    inv.summary_path = "summary.txt";
    cases.push_back(inv);
  }
  {
    CliInvocation inv;
    inv.objective = "quadratic";
    inv.init = InitSource::Inline;
    inv.points = {{-10.125, 20.0625}, {0.1, 0.2}};
    inv.step_mode = StepMode::Fixed;
    cases.push_back(inv);
  }
  SplitMix64 rng(4242);
  for (int trial = 0; trial < 25; ++trial) {
    CliInvocation inv;
    inv.objective = "rosenbrock";
    inv.init = InitSource::Random;
    inv.seed = rng.next();
    inv.agents = 1 + static_cast<int>(rng.next() % 9);
    inv.beta = rng.next_in(0.001, 2.0);
    inv.lambda = rng.next_double();
    inv.compare = (rng.next() & 1) != 0;
    cases.push_back(inv);
  }

  for (const CliInvocation& inv : cases) {
    EXPECT_EQ(parse_invocation(to_args(inv)), inv);
  }
}

TEST(RandomBoxPoints, AgentMajorDeterministicLayout) {
  const auto points = random_box_points(99, 3, 2, -1.0, 1.0);
  SplitMix64 rng(99);
  for (const Point& p : points) {
    for (double c : p) {
      EXPECT_EQ(c, rng.next_in(-1.0, 1.0));
    }
  }
  EXPECT_THROW(random_box_points(1, 0, 2, -1, 1), ConfigError);
  EXPECT_THROW(random_box_points(1, 3, 2, 1, -1), ConfigError);
}

TEST(TraceCsv, HeaderAndFirstRowsMatchSchema) {
  const RunResult result = experiment1_protocol_run();
  std::ostringstream os;
  write_trace_csv(result, os);
  const auto lines = split_lines(os.str());

  ASSERT_GE(lines.size(), 4u);
  EXPECT_EQ(lines[0], "iter,agent,x0,x1,f,step,best_f,max_dist");
  EXPECT_EQ(lines[1].rfind("0,1,-10,20,720,0,260,", 0), 0u) << lines[1];
  EXPECT_EQ(lines[2].rfind("0,2,10,10,260,0,260,", 0), 0u) << lines[2];
  EXPECT_EQ(lines[3].rfind("0,3,30,-20,1040,0,260,", 0), 0u) << lines[3];

  // One block of m rows per recorded iteration.
  EXPECT_EQ(lines.size(), 1 + 3 * result.trace.size());
}

TEST(TraceCsv, RewriteIsByteIdentical) {
  const RunResult result = experiment1_protocol_run();
  std::ostringstream first, second;
  write_trace_csv(result, first);
  write_trace_csv(result, second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(TraceCsv, FieldsRoundTripToIdenticalBits) {
  const RunResult result = experiment1_protocol_run();
  std::ostringstream os;
  write_trace_csv(result, os);
  const auto lines = split_lines(os.str());

  std::size_t line_index = 1;
  for (const IterationRecord& rec : result.trace) {
    for (std::size_t agent = 0; agent < rec.positions.size(); ++agent, ++line_index) {
      std::stringstream row(lines.at(line_index));
      std::string field;
      std::getline(row, field, ',');  // iter
      EXPECT_EQ(std::stol(field), rec.iteration);
      std::getline(row, field, ',');  // agent, 1-based
      EXPECT_EQ(std::stoul(field), agent + 1);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.positions[agent][0]);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.positions[agent][1]);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.values[agent]);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.step_lengths[agent]);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.best_value);
      std::getline(row, field, ',');
      EXPECT_EQ(std::stod(field), rec.max_pairwise_distance);
    }
  }
}

TEST(TraceCsv, CoordinateColumnsExtendWithDimension) {
  const Objective sphere3 = {"sphere3", 3,
                             [](const Point& p) {
                               return p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                             },
                             [](const Point& p) {
                               return Point{2 * p[0], 2 * p[1], 2 * p[2]};
                             }};
  SolverConfig cfg;
  cfg.step_size = 0.1;
  cfg.max_iterations = 3;
  cfg.initial_points = {{1, 2, 3}, {-1, 0, 1}};
  const RunResult result = run(cfg, sphere3);

  std::ostringstream os;
  write_trace_csv(result, os);
  const auto lines = split_lines(os.str());
  EXPECT_EQ(lines[0], "iter,agent,x0,x1,x2,f,step,best_f,max_dist");
  EXPECT_EQ(lines[1].rfind("0,1,1,2,3,14,0,", 0), 0u) << lines[1];
}

TEST(TraceCsv, EmptyTraceRejected) {
  RunResult empty;
  std::ostringstream os;
  EXPECT_THROW(write_trace_csv(empty, os), ConfigError);
}

TEST(Summary, CompareModeShowsBothCases) {
  ExperimentPreset preset = preset_experiment1();
  std::vector<LabeledRun> runs;
  runs.push_back({"protocol", run(preset.protocol, preset.objective)});
  runs.push_back({"no protocol", run(preset.no_protocol, preset.objective)});
  std::ostringstream os;
  write_summary(runs, os);
  const std::string text = os.str();

  EXPECT_NE(text.find("protocol"), std::string::npos);
  EXPECT_NE(text.find("no protocol"), std::string::npos);
  EXPECT_NE(text.find("stop reason"), std::string::npos);
  EXPECT_NE(text.find("iters to f<=1e-06"), std::string::npos);
  EXPECT_NE(text.find("consensus"), std::string::npos);
}

TEST(Summary, SingleModeOmitsComparisonColumns) {
  std::vector<LabeledRun> runs;
  runs.push_back({"run", experiment1_protocol_run()});
  std::ostringstream os;
  write_summary(runs, os);
  EXPECT_EQ(os.str().find("no protocol"), std::string::npos);
}

TEST(Summary, DivergedRunNamesAgentAndLastFiniteIteration) {
  SolverConfig cfg;
  cfg.step_size = 2.0;
  cfg.max_iterations = 2000;
  cfg.initial_points = {{10, 10}};
  const RunResult result = run(cfg, quadratic_objective());
  ASSERT_EQ(result.stop_reason, StopReason::Diverged);

  std::vector<LabeledRun> runs;
  runs.push_back({"run", result});
  std::ostringstream os;
  write_summary(runs, os);
  const std::string text = os.str();
  EXPECT_NE(text.find("diverged"), std::string::npos);
  EXPECT_NE(text.find("diverged agent"), std::string::npos);
  EXPECT_NE(text.find("last finite iter"), std::string::npos);
}

TEST(IterationsToThreshold, MatchesDirectTraceScan) {
  const RunResult result = experiment1_protocol_run();
  const auto reported = iterations_to_threshold(result, 1e-6);
  ASSERT_TRUE(reported.has_value());
  long expected = -1;
  for (const IterationRecord& rec : result.trace) {
    if (rec.best_value <= 1e-6) {
      expected = rec.iteration;
      break;
    }
  }
  EXPECT_EQ(*reported, expected);
  EXPECT_FALSE(iterations_to_threshold(result, -1.0).has_value());
}

TEST(RunMain, ExitCodesFollowTheContract) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_main({"run", "--preset", "exp1"}, out, err), 0);
  EXPECT_NE(out.str().find("stop reason"), std::string::npos);

  out.str("");
  err.str("");
  EXPECT_EQ(cli::run_main({"run", "--lambda", "7"}, out, err), 1);
  EXPECT_NE(err.str().find("--lambda"), std::string::npos);

  out.str("");
  err.str("");
  EXPECT_EQ(cli::run_main({"run", "--objective", "quadratic", "--init", "inline",
                           "--points", "10,10", "--beta", "2", "--max-iter", "2000"},
                          out, err),
            2);
}

TEST(RunMain, HelpPrintsUsageAndSucceeds) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_main({"run", "--help"}, out, err), 0);
  EXPECT_NE(out.str().find("--preset"), std::string::npos);
}

TEST(RunMain, CompareModeWritesLabeledTraceFiles) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "magd_cli_test";
  fs::create_directories(dir);
  const fs::path trace = dir / "out.csv";

  std::ostringstream out, err;
  const int code = cli::run_main({"run", "--preset", "exp1", "--compare", "--trace",
                                  trace.string(), "--summary",
                                  (dir / "summary.txt").string()},
                                 out, err);
  EXPECT_EQ(code, 0);
  EXPECT_TRUE(fs::exists(dir / "out.protocol.csv"));
  EXPECT_TRUE(fs::exists(dir / "out.no_protocol.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));

  std::ifstream summary(dir / "summary.txt");
  std::stringstream content;
  content << summary.rdbuf();
  EXPECT_NE(content.str().find("no protocol"), std::string::npos);
  fs::remove_all(dir);
}
