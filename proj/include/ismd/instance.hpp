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

// A two-stage instance: linear first stage c^T x1 over a simplex or a unit
// ball, Gaussian scenarios xi ~ N(mean, diag(std^2)) of length 2n, and one of
// the two second-stage families.

#ifndef ISMD_INSTANCE_HPP_
#define ISMD_INSTANCE_HPP_

#include <optional>
#include <string>
#include <variant>

#include "ismd/error.hpp"
#include "ismd/geometry.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"

namespace ismd {

enum class ProblemKind { kSimplex, kBall };

inline std::string ToString(ProblemKind kind) {
  return kind == ProblemKind::kSimplex ? "simplex" : "ball";
}

inline ProblemKind ParseProblemKind(const std::string& name) {
  if (name == "simplex") return ProblemKind::kSimplex;
  if (name == "ball") return ProblemKind::kBall;
  throw InvalidInput("unknown problem '" + name + "' (expected simplex|ball)");
}

class TwoStageInstance {
 public:
  TwoStageInstance(ProblemKind kind, Vector cost, Vector xi_mean,
                   Vector xi_std, double lambda_reg, SecondStage stage)
      : kind_(kind),
        cost_(std::move(cost)),
        xi_mean_(std::move(xi_mean)),
        xi_std_(std::move(xi_std)),
        lambda_reg_(lambda_reg),
        stage_(std::move(stage)),
        first_stage_(FirstStageSet::Simplex(1)) {
    const int n = StageDim(stage_);
    internal::Require(cost_.size() == n, "TwoStageInstance: c must have size n");
    internal::Require(xi_mean_.size() == 2 * n && xi_std_.size() == 2 * n,
                      "TwoStageInstance: scenario parameters must have size 2n");
    internal::Require(cost_.allFinite() && xi_mean_.allFinite() &&
                          xi_std_.allFinite(),
                      "TwoStageInstance: non-finite data");
    internal::Require((xi_std_.array() > 0.0).all(),
                      "TwoStageInstance: standard deviations must be positive");
    internal::Require(lambda_reg > 0.0, "TwoStageInstance: lambda must be > 0");
    if (kind_ == ProblemKind::kSimplex) {
      internal::Require(std::holds_alternative<SimplexStage>(stage_),
                        "TwoStageInstance: simplex problem needs SimplexStage");
      first_stage_ = FirstStageSet::Simplex(n);
      dgf_ = DistanceGenerator::kEntropy;
    } else {
      internal::Require(std::holds_alternative<BallStage>(stage_),
                        "TwoStageInstance: ball problem needs BallStage");
      first_stage_ = FirstStageSet::Ball(std::get<BallStage>(stage_).x0, 1.0);
      dgf_ = DistanceGenerator::kHalfSquaredEuclidean;
    }
  }

  ProblemKind kind() const { return kind_; }
  int n() const { return static_cast<int>(cost_.size()); }
  const Vector& cost() const { return cost_; }
  const Vector& xi_mean() const { return xi_mean_; }
  const Vector& xi_std() const { return xi_std_; }
  double lambda_reg() const { return lambda_reg_; }
  const SecondStage& stage() const { return stage_; }
  const FirstStageSet& first_stage_set() const { return first_stage_; }
  DistanceGenerator dgf() const { return dgf_; }

  Scenario Sample(RngStream& rng) const {
    return Scenario::FromXi(GaussianVector(rng, xi_mean_, xi_std_), lambda_reg_);
  }

  SolveReport SolveStage(const Vector& x1, const Scenario& scen, double eps,
                         std::optional<int> iter_cap) const {
    return Solve(stage_, x1, scen, eps, iter_cap);
  }

  double FirstStageValue(const Vector& x1) const { return cost_.dot(x1); }
  Vector FirstStageSubgradient(const Vector& /*x1*/) const { return cost_; }

  // H = grad_x f2 + sum mu_i grad_x g_i at the reported second-stage point.
  Vector RecourseGradient(const Vector& x1, const Scenario& scen,
                          const SolveReport& report) const {
    internal::Require(x1.size() == n() && report.x2.size() == n(),
                      "RecourseGradient: dimension mismatch");
    Vector h = scen.GradX(x1, report.x2);
    if (const auto* ball = std::get_if<BallStage>(&stage_)) {
      internal::Require(report.mu.size() == 1,
                        "RecourseGradient: ball stage needs one multiplier");
      h += report.mu(0) * ball->ConstraintGradX(x1);
    } else {
      internal::Require(report.mu.size() == 0 && report.lambda.size() == 0,
                        "RecourseGradient: simplex stage has no multipliers");
    }
    return h;
  }

 private:
  ProblemKind kind_;
  Vector cost_;
  Vector xi_mean_;
  Vector xi_std_;
  double lambda_reg_;
  SecondStage stage_;
  FirstStageSet first_stage_;
  DistanceGenerator dgf_ = DistanceGenerator::kEntropy;
};

// G = s_f1 + H.
inline Vector AssembleGradient(const TwoStageInstance& instance,
                               const Vector& x1, const Scenario& scen,
                               const SolveReport& report, const Vector& s_f1) {
  internal::Require(s_f1.size() == instance.n(),
                    "AssembleGradient: s_f1 dimension mismatch");
  return s_f1 + instance.RecourseGradient(x1, scen, report);
}

}  // namespace ismd

#endif  // ISMD_INSTANCE_HPP_
