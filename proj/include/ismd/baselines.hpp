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

// Reference methods on a fixed scenario sample: a first-order SAA solver and
// the single-cut L-shaped method for the simplex first stage.

#ifndef ISMD_BASELINES_HPP_
#define ISMD_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ismd/cuts.hpp"
#include "ismd/error.hpp"
#include "ismd/geometry.hpp"
#include "ismd/instance.hpp"
#include "ismd/lp.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"

namespace ismd {

// The first `count` draws of the seed's scenario stream; RunIsmd with the
// same seed sees the same sequence.
inline std::vector<Scenario> DrawScenarios(const TwoStageInstance& instance,
                                           int count, std::uint64_t seed) {
  internal::Require(count >= 1, "DrawScenarios: count must be >= 1");
  RngStream rng(seed);
  std::vector<Scenario> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(instance.Sample(rng));
  return out;
}

// Value and gradient of F(x) = c^T x + mean_i Q(x, xi_i) from oracle solves
// and exact-cut slopes. Second-stage solutions are kept as warm starts.
class SampleAverage {
 public:
  SampleAverage(const TwoStageInstance& instance,
                const std::vector<Scenario>& scenarios)
      : instance_(instance), scenarios_(scenarios) {
    internal::Require(!scenarios_.empty(), "SampleAverage: no scenarios");
    for (const Scenario& s : scenarios_) {
      internal::Require(s.n() == instance.n(),
                        "SampleAverage: scenario dimension mismatch");
    }
    warm_.resize(scenarios_.size());
  }

  struct Evaluation {
    double value = 0.0;
    Vector gradient;
  };

  Evaluation Evaluate(const Vector& x) {
    Evaluation out;
    out.gradient = Vector::Zero(x.size());
    double total = 0.0;
    const auto* simplex = std::get_if<SimplexStage>(&instance_.stage());
    for (std::size_t i = 0; i < scenarios_.size(); ++i) {
      const Scenario& scen = scenarios_[i];
      SolveReport report;
      if (simplex != nullptr) {
        report = SolveSimplexStage(*simplex, x, scen, kOracleEps, {},
                                   warm_[i].size() > 0 ? &warm_[i] : nullptr);
        warm_[i] = report.x2;
      } else {
        report = OracleSolve(instance_.stage(), x, scen);
      }
      total += report.primal_value;
      out.gradient += instance_.RecourseGradient(x, scen, report);
    }
    const double count = static_cast<double>(scenarios_.size());
    out.value = instance_.FirstStageValue(x) + total / count;
    out.gradient = instance_.FirstStageSubgradient(x) + out.gradient / count;
    ++evaluations_;
    return out;
  }

  int evaluations() const { return evaluations_; }

 private:
  const TwoStageInstance& instance_;
  const std::vector<Scenario>& scenarios_;
  std::vector<Vector> warm_;
  int evaluations_ = 0;
};

struct SaaConfig {
  int sample_size = 1000;
  double tolerance = 1e-6;  // on the Frank-Wolfe gap over X1
  int max_iterations = 5000;
  std::uint64_t seed = 0;
};

struct SaaTracePoint {
  int iteration = 0;
  double value = 0.0;
  double certificate = 0.0;
  double step = 0.0;  // 1 / L used for the step
};

struct SaaResult {
  Vector x1;
  double value = 0.0;
  double certificate = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<SaaTracePoint> trace;
};

// Projected gradient with an adaptive curvature estimate L: each step tries
// 0.8 L and doubles until the descent test passes. Projection goes
// through the Euclidean prox. The certificate is the Frank-Wolfe gap at the
// current iterate, which is exact (zero) once a vertex optimum is reached.
inline SaaResult SaaSolveScenarios(const TwoStageInstance& instance,
                                   const std::vector<Scenario>& scenarios,
                                   double tolerance, int max_iterations) {
  internal::Require(tolerance > 0.0, "SaaSolve: tolerance must be positive");
  internal::Require(max_iterations >= 1, "SaaSolve: max_iterations must be >= 1");
  const FirstStageSet& set = instance.first_stage_set();
  SampleAverage avg(instance, scenarios);

  double lip = 0.0;
  for (const Scenario& s : scenarios) lip += s.s_lambda_max();
  lip /= static_cast<double>(scenarios.size());

  Vector x = set.OmegaCenter(DistanceGenerator::kHalfSquaredEuclidean);
  SampleAverage::Evaluation fx = avg.Evaluate(x);
  SaaResult result;
  result.x1 = x;
  result.value = fx.value;
  result.certificate = FrankWolfeGap(set, fx.gradient, x);
  for (int k = 1; k <= max_iterations && result.certificate > tolerance; ++k) {
    // F is lambda-strongly convex, so L never needs to drop below lambda.
    lip = std::max(0.8 * lip, instance.lambda_reg());
    Vector x_next;
    SampleAverage::Evaluation f_next;
    while (true) {
      x_next = ProxStep(DistanceGenerator::kHalfSquaredEuclidean, set, x,
                        fx.gradient / lip);
      f_next = avg.Evaluate(x_next);
      // By convexity F(x+) - F(x) <= <grad F(x+), d>, so this gradient test
      // implies the descent lemma without cancellation in F values.
      const Vector d = x_next - x;
      if ((f_next.gradient - fx.gradient).dot(d) <= 0.5 * lip * d.squaredNorm() ||
          lip > 1e15) {
        break;
      }
      lip *= 2.0;
    }
    x = x_next;
    fx = f_next;
    const double cert = FrankWolfeGap(set, fx.gradient, x);
    result.trace.push_back({k, fx.value, cert, 1.0 / lip});
    result.iterations = k;
    if (cert < result.certificate) {
      result.certificate = cert;
      result.x1 = x;
      result.value = fx.value;
    }
  }
  result.converged = result.certificate <= tolerance;
  return result;
}

inline SaaResult SaaSolve(const TwoStageInstance& instance,
                          const SaaConfig& config) {
  internal::Require(config.sample_size >= 1, "SaaSolve: N must be >= 1");
  const std::vector<Scenario> scenarios =
      DrawScenarios(instance, config.sample_size, config.seed);
  return SaaSolveScenarios(instance, scenarios, config.tolerance,
                           config.max_iterations);
}

struct LShapedIteration {
  int iter = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct LShapedResult {
  Vector x1;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<Cut> cuts;  // aggregated cuts on the expected recourse
  std::vector<LShapedIteration> history;
};

// Single-cut L-shaped: master LP min c^T x + theta over the simplex with
// theta >= C_k(x). Stops when (upper - lower) / max(1, |upper|) <= rel_gap.
inline LShapedResult LShapedSolve(const TwoStageInstance& instance,
                                  const std::vector<Scenario>& scenarios,
                                  double rel_gap = 0.05,
                                  int max_iterations = 500) {
  if (!instance.first_stage_set().is_simplex()) {
    throw InvalidInput("LShapedSolve: only the simplex first stage is "
                       "supported");
  }
  internal::Require(rel_gap >= 0.0, "LShapedSolve: rel_gap must be >= 0");
  const int n = instance.n();
  SampleAverage avg(instance, scenarios);
  LShapedResult result;

  // Master without cuts: cheapest vertex.
  Eigen::Index best_vertex = 0;
  instance.cost().minCoeff(&best_vertex);
  Vector x = Vector::Zero(n);
  x(best_vertex) = 1.0;

  for (int k = 1; k <= max_iterations; ++k) {
    const SampleAverage::Evaluation eval = avg.Evaluate(x);
    const double recourse = eval.value - instance.FirstStageValue(x);
    if (eval.value < result.upper) {
      result.upper = eval.value;
      result.x1 = x;
    }
    Cut cut;
    cut.anchor = x;
    cut.value_at_anchor = recourse;
    cut.slope = eval.gradient - instance.FirstStageSubgradient(x);
    cut.anchor_gap_bound = 0.0;
    result.cuts.push_back(cut);

    // Variables (x, theta); theta free.
    const int kc = static_cast<int>(result.cuts.size());
    LpProblem lp;
    lp.cost = Vector::Zero(n + 1);
    lp.cost.head(n) = instance.cost();
    lp.cost(n) = 1.0;
    lp.a_eq = Matrix::Zero(1, n + 1);
    lp.a_eq.block(0, 0, 1, n).setOnes();
    lp.b_eq = Vector::Ones(1);
    lp.a_ub = Matrix::Zero(kc, n + 1);
    lp.b_ub = Vector::Zero(kc);
    for (int i = 0; i < kc; ++i) {
      const Cut& c = result.cuts[i];
      lp.a_ub.row(i).head(n) = c.slope.transpose();
      lp.a_ub(i, n) = -1.0;
      lp.b_ub(i) = c.slope.dot(c.anchor) - c.value_at_anchor;
    }
    lp.lower = Vector::Zero(n + 1);
    lp.lower(n) = -std::numeric_limits<double>::infinity();
    const LpResult master = DenseLpSolve(lp);
    if (master.status != LpStatus::kOptimal) {
      throw NumericalFailure("LShapedSolve: master LP not optimal");
    }
    result.lower = std::max(result.lower, master.value);
    result.iterations = k;
    result.history.push_back({k, result.lower, result.upper});
    if ((result.upper - result.lower) / std::max(1.0, std::abs(result.upper)) <=
        rel_gap) {
      result.converged = true;
      break;
    }
    x = ProjectSimplex(master.x.head(n));
  }
  return result;
}

}  // namespace ismd

#endif  // ISMD_BASELINES_HPP_
