// Copyright 2026 The ismd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ismd/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ismd/cli.hpp"

namespace ismd {
namespace {

namespace fs = std::filesystem;

int RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "ismd_cli");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return CliMain(static_cast<int>(argv.size()), argv.data());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountLines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ismd_experiments_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(GenerateInstanceTest, DrawsWithinRanges) {
  InstanceSpec spec;
  spec.n = 8;
  spec.seed = 3;
  const TwoStageInstance inst = GenerateInstance(spec);
  EXPECT_EQ(inst.n(), 8);
  EXPECT_GE(inst.cost().minCoeff(), 1.0);
  EXPECT_LE(inst.cost().maxCoeff(), 3.0);
  EXPECT_EQ(inst.xi_mean().size(), 16);
  EXPECT_GE(inst.xi_mean().minCoeff(), 5.0);
  EXPECT_LE(inst.xi_mean().maxCoeff(), 25.0);
  EXPECT_GE(inst.xi_std().minCoeff(), 5.0);
  EXPECT_LE(inst.xi_std().maxCoeff(), 15.0);
  EXPECT_EQ(inst.dgf(), DistanceGenerator::kEntropy);
  EXPECT_EQ(GenerateInstance(spec).cost(), inst.cost());
}

TEST(GenerateInstanceTest, BallUsesCenterAndRadius) {
  InstanceSpec spec;
  spec.problem = ProblemKind::kBall;
  spec.n = 3;
  const TwoStageInstance inst = GenerateInstance(spec);
  const auto& ball = std::get<BallStage>(inst.stage());
  EXPECT_EQ(ball.R, 5.0);
  EXPECT_EQ(ball.x0, Vector::Constant(3, 10.0));
  EXPECT_EQ(ball.y0, Vector::Constant(3, 10.0));
  EXPECT_EQ(inst.first_stage_set().radius(), 1.0);
  EXPECT_EQ(inst.dgf(), DistanceGenerator::kHalfSquaredEuclidean);
}

TEST(GenerateInstanceTest, RejectsInvalidSpecs) {
  InstanceSpec spec;
  spec.n = 0;
  EXPECT_THROW(GenerateInstance(spec), InvalidInput);
  spec.n = 2;
  spec.c_min = 4.0;
  EXPECT_THROW(GenerateInstance(spec), InvalidInput);
  spec = InstanceSpec{};
  spec.problem = ProblemKind::kBall;
  spec.radius = 1.0;
  EXPECT_THROW(GenerateInstance(spec), SlaterViolation);
}

TEST(GenerateInstanceTest, MatrixScenarioIsPositiveDefinite) {
  RngStream rng(4);
  const Scenario s = GenerateMatrixScenario(3, 2.0, rng);
  EXPECT_EQ(s.n(), 3);
  EXPECT_GE(s.s_lambda_min(), 2.0 - 1e-9);
  EXPECT_EQ(s.c1(), Vector::Ones(3));
  EXPECT_LE((s.DenseS() - s.DenseS().transpose()).norm(), 0.0);
}

TEST(ConfigTest, ParsesKeysAndComments) {
  std::istringstream in(
      "# instance\n"
      "problem = ball\n"
      "n = 4   # trailing comment\n"
      "lambda_reg = 1.5\n"
      "R = 6\n"
      "x0 = 2\n"
      "seed = 11\n");
  const InstanceSpec spec = ParseInstanceConfig(in);
  EXPECT_EQ(spec.problem, ProblemKind::kBall);
  EXPECT_EQ(spec.n, 4);
  EXPECT_EQ(spec.lambda_reg, 1.5);
  EXPECT_EQ(spec.radius, 6.0);
  EXPECT_EQ(spec.center, 2.0);
  EXPECT_EQ(spec.seed, 11u);
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("n = 3\nstep = 2\n");
  EXPECT_THROW(ParseInstanceConfig(unknown), InvalidInput);
  std::istringstream bad_number("lambda_reg = two\n");
  EXPECT_THROW(ParseInstanceConfig(bad_number), InvalidInput);
  std::istringstream no_equals("n 3\n");
  EXPECT_THROW(ParseInstanceConfig(no_equals), InvalidInput);
  std::istringstream bad_problem("problem = cube\n");
  EXPECT_THROW(ParseInstanceConfig(bad_problem), InvalidInput);
  std::istringstream negative_seed("seed = -1\n");
  EXPECT_THROW(ParseInstanceConfig(negative_seed), InvalidInput);
}

TEST(MethodTest, ParseRoundTripAndDefaults) {
  for (Method m : {Method::kSmd, Method::kIsmd1, Method::kIsmd2, Method::kIsmd3,
                   Method::kIsmd4, Method::kTheory, Method::kSaa, Method::kLShaped}) {
    EXPECT_EQ(ParseMethod(ToString(m)), m);
  }
  EXPECT_THROW(ParseMethod("sgd"), InvalidInput);
  EXPECT_EQ(DefaultImax(ProblemKind::kSimplex, 600), 15);
  EXPECT_EQ(DefaultImax(ProblemKind::kBall, 200), 15);
  EXPECT_EQ(DefaultImax(ProblemKind::kBall, 400), 25);
  EXPECT_EQ(DefaultImax(ProblemKind::kBall, 600), 28);
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(2.0), "2");
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.Uniform(-1.0, 1.0), static_cast<int>(rng.Uniform(-60, 60)));
    ASSERT_EQ(std::strtod(FormatNumber(v).c_str(), nullptr), v);
  }
}

TEST(ComparisonTest, RowsAndDeterminism) {
  RunManifest m;
  m.instance.n = 3;
  m.instance.seed = 2;
  m.N = 60;
  m.methods = {Method::kSmd, Method::kIsmd2, Method::kSaa, Method::kLShaped};
  m.seeds = {1, 2};
  const ComparisonOutput a = RunMethodComparison(m);
  const ComparisonOutput b = RunMethodComparison(m);
  ASSERT_EQ(a.summary.size(), 8u);
  ASSERT_EQ(a.bounds.size(), 2u);
  int smd_rows = 0;
  for (const TraceRow& r : a.trace) smd_rows += r.method == "smd" ? 1 : 0;
  EXPECT_EQ(smd_rows, 120);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.summary.size(); ++i) {
    EXPECT_EQ(a.summary[i].method, b.summary[i].method);
    EXPECT_EQ(a.summary[i].final_value, b.summary[i].final_value);
  }
  std::ostringstream trace_a, trace_b;
  WriteTraceCsv(trace_a, a.trace);
  WriteTraceCsv(trace_b, b.trace);
  EXPECT_EQ(trace_a.str(), trace_b.str());
  EXPECT_EQ(trace_a.str().substr(0, trace_a.str().find('\n')),
            "method,seed,t,f_running,eps_certified,step");
}

TEST(ComparisonTest, ConfigForMapsMethods) {
  RunManifest m;
  m.instance.problem = ProblemKind::kBall;
  m.instance.n = 400;
  const IsmdConfig c = ConfigFor(Method::kIsmd4, m, 7);
  const auto& cap = std::get<CapSchedule>(c.accuracy);
  EXPECT_EQ(cap.variant, CapVariant::kIsmd4);
  EXPECT_EQ(cap.i_max, 25);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_TRUE(std::holds_alternative<TheorySchedule>(ConfigFor(Method::kTheory, m, 1).accuracy));
  EXPECT_THROW(ConfigFor(Method::kSaa, m, 1), InvalidInput);
}

TEST(Table1Test, FixedStrongIsMoreConservative) {
  const std::vector<Table1Row> rows = RunTable1Analog({4}, {1.0}, {1e-2, 1e-5}, {1, 2}, 10);
  ASSERT_EQ(rows.size(), 4u);
  for (const Table1Row& r : rows) {
    EXPECT_GT(r.alpha, 0.0);
    EXPECT_LE(r.mean_eps, r.eps_target);
    EXPECT_GT(r.mean_eta1, r.mean_eta2);
  }
}

TEST(Table1Test, EtaTrajectoryShrinks) {
  RngStream rng(6);
  const Scenario scen = GenerateMatrixScenario(5, 1.0, rng);
  const SimplexStage stage{5, 1.0};
  const CutProblemData data = MakeCutData(stage, scen, Vector::Constant(5, 0.2));
  const std::vector<EtaTrajectoryPoint> traj = EtaTrajectory(data, 2000);
  ASSERT_GE(traj.size(), 2u);
  EXPECT_EQ(traj.front().cap, 0);
  EXPECT_LT(traj.back().eta_strong, traj.front().eta_strong);
  EXPECT_LT(traj.back().eps, traj.front().eps);
}

TEST(EstimateMStarTest, PositiveAndDeterministic) {
  InstanceSpec spec;
  spec.n = 3;
  const TwoStageInstance inst = GenerateInstance(spec);
  const double a = EstimateMStar(inst, 50, 1);
  EXPECT_GT(a, inst.cost().maxCoeff());
  EXPECT_EQ(a, EstimateMStar(inst, 50, 1));
  EXPECT_THROW(EstimateMStar(inst, 0, 1), InvalidInput);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli({}), 2);
  EXPECT_EQ(RunCli({"solve", "--no-such-flag"}), 2);
  EXPECT_EQ(RunCli({"solve", "--method", "sgd"}), 2);
  EXPECT_EQ(RunCli({"solve", "--n", "0"}), 2);
  EXPECT_EQ(RunCli({"bound", "--N", "100"}), 0);
}

TEST(CliTest, SolveWritesOneRowPerIteration) {
  const fs::path dir = ScratchDir("solve");
  const fs::path out = dir / "trace.csv";
  ASSERT_EQ(RunCli({"solve", "--method", "ismd3", "--n", "3", "--N", "50", "--seed", "4",
                    "--out", out.string()}),
            0);
  EXPECT_EQ(CountLines(ReadFile(out)), 51);
  fs::remove_all(dir);
}

TEST(CliTest, CompareWritesTraceSummaryAndBounds) {
  const fs::path dir = ScratchDir("compare");
  const std::string prefix = (dir / "run").string();
  ASSERT_EQ(RunCli({"compare", "--n", "3", "--methods", "smd,lshaped", "--seeds", "1..2",
                    "--N", "40", "--out", prefix}),
            0);
  EXPECT_TRUE(fs::exists(prefix + "_trace.csv"));
  EXPECT_EQ(CountLines(ReadFile(prefix + "_summary.csv")), 5);
  EXPECT_TRUE(fs::exists(prefix + "_lshaped_seed1_bounds.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_lshaped_seed2_bounds.csv"));
  fs::remove_all(dir);
}

TEST(CliTest, GenerateWritesJson) {
  const fs::path dir = ScratchDir("generate");
  const fs::path out = dir / "inst.json";
  ASSERT_EQ(RunCli({"generate", "--problem", "ball", "--n", "2", "--out", out.string()}), 0);
  const nlohmann::json j = nlohmann::json::parse(ReadFile(out));
  EXPECT_EQ(j["problem"], "ball");
  EXPECT_EQ(j["c"].size(), 2u);
  EXPECT_EQ(j["xi_mean"].size(), 4u);
  EXPECT_EQ(j["R"], 5.0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ismd
