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

#include "ismd/mirror_descent.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ismd/instance.hpp"

namespace ismd {
namespace {

// Deterministic linear objective over the simplex with a zero recourse.
struct LinearProblem {
  Vector cost;

  FirstStageSet first_stage_set() const {
    return FirstStageSet::Simplex(static_cast<int>(cost.size()));
  }
  DistanceGenerator dgf() const { return DistanceGenerator::kEntropy; }
  Scenario Sample(RngStream& /*rng*/) const {
    return Scenario::FromXi(Vector::Zero(2 * cost.size()), 1.0);
  }
  SolveReport SolveStage(const Vector& x, const Scenario& /*s*/, double /*eps*/,
                         std::optional<int> /*cap*/) const {
    SolveReport r;
    r.x2 = Vector::Zero(x.size());
    return r;
  }
  double FirstStageValue(const Vector& x) const { return cost.dot(x); }
  Vector FirstStageSubgradient(const Vector& /*x*/) const { return cost; }
  Vector RecourseGradient(const Vector& x, const Scenario& /*s*/,
                          const SolveReport& /*r*/) const {
    return Vector::Zero(x.size());
  }
};

static_assert(StochasticTwoStageProblem<LinearProblem>);
static_assert(StochasticTwoStageProblem<TwoStageInstance>);

TwoStageInstance SmallSimplexInstance() {
  const int n = 3;
  return TwoStageInstance(ProblemKind::kSimplex, Eigen::Vector3d(1.0, 2.0, 3.0),
                          Vector::Constant(2 * n, 5.0), Vector::Constant(2 * n, 2.0),
                          2.0, SimplexStage{n, 2.0});
}

TwoStageInstance SmallBallInstance() {
  const int n = 2;
  const Vector center = Vector::Constant(n, 10.0);
  return TwoStageInstance(ProblemKind::kBall, Eigen::Vector2d(1.0, 2.0),
                          Vector::Constant(2 * n, 5.0), Vector::Constant(2 * n, 2.0),
                          2.0, BallStage(center, center, 5.0, 2.0));
}

TEST(CapScheduleTest, KnownCaps) {
  for (int t = 801; t <= 1000; ++t) {
    ASSERT_EQ(CapForIteration(CapVariant::kIsmd1, t, 2000, 15), 8) << t;
  }
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd1, 1, 2000, 15), 2);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd1, 2000, 2000, 15), 15);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd2, 1, 1000, 15), 3);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd2, 501, 1000, 15), 15);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd3, 20, 1000, 15), 8);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd3, 101, 1000, 15), 15);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd4, 1, 1000, 15), 11);
  EXPECT_EQ(CapForIteration(CapVariant::kIsmd4, 301, 1000, 15), 15);
}

TEST(CapScheduleTest, CapsAreNondecreasingAndEndAtImax) {
  for (CapVariant v : {CapVariant::kIsmd1, CapVariant::kIsmd2, CapVariant::kIsmd3,
                       CapVariant::kIsmd4}) {
    for (int big_n : {2, 7, 100, 1234}) {
      int previous = 0;
      for (int t = 1; t <= big_n; ++t) {
        const int cap = CapForIteration(v, t, big_n, 20);
        ASSERT_GE(cap, previous);
        ASSERT_GE(cap, 1);
        ASSERT_LE(cap, 20);
        previous = cap;
      }
      ASSERT_EQ(previous, 20) << ToString(v);
    }
  }
  EXPECT_THROW(CapForIteration(CapVariant::kIsmd1, 0, 10, 15), InvalidInput);
  EXPECT_THROW(CapForIteration(CapVariant::kIsmd1, 1, 10, 0), InvalidInput);
}

TEST(InnerAccuracyTest, Modes) {
  const auto exact = InnerAccuracy(ExactAccuracy{1e-8}, 5, 10);
  EXPECT_EQ(exact.first, 1e-8);
  EXPECT_FALSE(exact.second);
  const auto theory = InnerAccuracy(TheorySchedule{4.0}, 2, 10);
  EXPECT_EQ(theory.first, 1.0);
  EXPECT_FALSE(theory.second);
  const auto capped = InnerAccuracy(CapSchedule{CapVariant::kIsmd4, 10, 1e-9}, 1, 10);
  EXPECT_EQ(capped.first, 1e-9);
  EXPECT_EQ(capped.second, 7);
  const auto uncapped =
      InnerAccuracy(CapSchedule{CapVariant::kIsmd4, std::nullopt, 1e-9}, 1, 10);
  EXPECT_FALSE(uncapped.second);
}

TEST(RateBoundTest, KnownValue) {
  RateBoundInputs in;
  in.theta1 = 1.0;
  in.theta2 = 1.0;
  in.d_omega = 1.0;
  in.mu_omega = 1.0;
  in.u_bar = 1.0;
  in.m_star = 1.0;
  // 3 / 100 + ln(100) / 100 + 2 / 20.
  EXPECT_NEAR(RateBound(in, 100), 0.176052, 1e-6);
  in.m_star = 0.0;
  EXPECT_THROW(RateBound(in, 100), InvalidInput);
}

TEST(RateBoundTest, BalancedTheta1MinimizesLeadingTerm) {
  RateBoundInputs in;
  in.theta2 = 0.0;
  in.d_omega = 1.5;
  in.m_star = 40.0;
  in.theta1 = BalancedTheta1(in.d_omega, in.mu_omega, in.m_star);
  const double at_balanced = RateBound(in, 1000);
  for (double factor : {0.5, 0.9, 1.1, 2.0}) {
    RateBoundInputs other = in;
    other.theta1 *= factor;
    EXPECT_GT(RateBound(other, 1000), at_balanced);
  }
  EXPECT_NEAR(at_balanced, in.d_omega * in.m_star / std::sqrt(1000.0), 1e-12);
}

TEST(RateBoundTest, Constants) {
  EXPECT_NEAR(UbarConstant(1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 3.0), 3.0, 1e-15);
  EXPECT_NEAR(UbarConstant(0.0, 0.0, 0.0, 1.0, 4.0, 1.0, 1.0), 1.0, 1e-15);
  const std::vector<double> samples = {3.0, 4.0};
  EXPECT_NEAR(MStarConstant(0.0, samples), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(U2Constant(3.0, 1.0, 1.0, 2.0, 0.5, 1.0, 4.0), 4.0, 1e-15);
}

TEST(RunIsmdTest, DeterministicLinearProblemMeetsBound) {
  const LinearProblem problem{Eigen::Vector3d(1.0, 2.0, 3.0)};
  IsmdConfig config;
  config.N = 10000;
  const IsmdRun run = RunIsmd(problem, config);
  RateBoundInputs in;
  in.theta2 = 0.0;
  in.d_omega = OmegaRadius(DistanceGenerator::kEntropy, problem.first_stage_set());
  in.m_star = 3.0;
  EXPECT_GE(run.f_hat, 1.0);
  EXPECT_LE(run.f_hat - 1.0, RateBound(in, config.N));
  EXPECT_GT(run.x1_avg(0), 0.9);
}

TEST(RunIsmdTest, SameSeedReproducesTrace) {
  const TwoStageInstance inst = SmallSimplexInstance();
  IsmdConfig config;
  config.N = 200;
  config.seed = 9;
  config.accuracy = CapSchedule{CapVariant::kIsmd1, 15, 1e-10};
  const IsmdRun a = RunIsmd(inst, config);
  const IsmdRun b = RunIsmd(inst, config);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    ASSERT_EQ(a.trace[i].value, b.trace[i].value);
    ASSERT_EQ(a.trace[i].cap, b.trace[i].cap);
  }
  EXPECT_EQ(a.f_hat, b.f_hat);
  config.seed = 10;
  EXPECT_NE(RunIsmd(inst, config).f_hat, a.f_hat);
}

TEST(RunIsmdTest, OutputsAreConsistentAndFeasible) {
  for (const TwoStageInstance& inst : {SmallSimplexInstance(), SmallBallInstance()}) {
    IsmdConfig config;
    config.N = 300;
    config.seed = 3;
    config.keep_iterates = true;
    config.accuracy = TheorySchedule{1.0};
    const IsmdRun run = RunIsmd(inst, config);
    ASSERT_EQ(run.trace.size(), 300u);
    ASSERT_EQ(run.iterates.size(), 300u);
    ASSERT_EQ(run.samples.size(), 300u);
    EXPECT_DOUBLE_EQ(run.trace.back().f_running, run.f_hat);
    EXPECT_NEAR(run.step, 1.0 / std::sqrt(300.0), 1e-15);
    EXPECT_TRUE(inst.first_stage_set().Contains(run.x1_avg, 1e-9));
    for (const Vector& x : run.iterates) {
      ASSERT_TRUE(inst.first_stage_set().Contains(x, 1e-9));
    }
    for (const IterationRecord& r : run.trace) {
      ASSERT_LE(r.eps_certified, 1.0 / (static_cast<double>(r.t) * r.t));
    }
  }
}

TEST(RunIsmdTest, UncappedScheduleEqualsExactMode) {
  const TwoStageInstance inst = SmallSimplexInstance();
  IsmdConfig exact;
  exact.N = 150;
  exact.seed = 4;
  exact.accuracy = ExactAccuracy{1e-10};
  IsmdConfig uncapped = exact;
  uncapped.accuracy = CapSchedule{CapVariant::kIsmd3, std::nullopt, 1e-10};
  EXPECT_EQ(RunIsmd(inst, exact).f_hat, RunIsmd(inst, uncapped).f_hat);
}

TEST(RunIsmdTest, SweepMatchesIndividualRuns) {
  const TwoStageInstance inst = SmallBallInstance();
  IsmdConfig config;
  config.seed = 5;
  const std::vector<int> grid = {10, 40};
  const auto sweep = SweepIsmd(inst, config, grid);
  ASSERT_EQ(sweep.size(), 2u);
  config.N = 40;
  EXPECT_EQ(sweep[1].first, 40);
  EXPECT_EQ(sweep[1].second, RunIsmd(inst, config).f_hat);
}

TEST(RunIsmdTest, RejectsInvalidConfig) {
  const TwoStageInstance inst = SmallSimplexInstance();
  IsmdConfig config;
  config.N = 1;
  EXPECT_THROW(RunIsmd(inst, config), InvalidInput);
  config.N = 10;
  config.theta1 = 0.0;
  EXPECT_THROW(RunIsmd(inst, config), InvalidInput);
  config.theta1 = 1.0;
  config.accuracy = CapSchedule{CapVariant::kIsmd1, 0, 1e-10};
  EXPECT_THROW(RunIsmd(inst, config), InvalidInput);
  config.accuracy = TheorySchedule{-1.0};
  EXPECT_THROW(RunIsmd(inst, config), InvalidInput);
}

}  // namespace
}  // namespace ismd
