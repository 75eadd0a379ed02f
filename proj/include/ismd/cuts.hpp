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

// Exact and inexact affine minorants of the second-stage value function
// Q(x) = min_y {f(y, x) : y feasible for x}, built from a solve report.

#ifndef ISMD_CUTS_HPP_
#define ISMD_CUTS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "ismd/error.hpp"
#include "ismd/geometry.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"
#include "ismd/strong_concavity.hpp"

namespace ismd {

enum class CutVariant {
  kExact,
  kFixedL1,
  kFixedStrong,
  kVariableL2,
  kVariableStrong,
  kCorollary,
};

inline std::string ToString(CutVariant v) {
  switch (v) {
    case CutVariant::kExact: return "exact";
    case CutVariant::kFixedL1: return "fixed_l1";
    case CutVariant::kFixedStrong: return "fixed_strong";
    case CutVariant::kVariableL2: return "variable_l2";
    case CutVariant::kVariableStrong: return "variable_strong";
    case CutVariant::kCorollary: return "corollary";
  }
  return "unknown";
}

struct Cut {
  Vector anchor;
  double value_at_anchor = 0.0;
  Vector slope;
  double eta = 0.0;
  CutVariant variant = CutVariant::kExact;
  char corollary_case = 0;  // 'a'..'i' for kCorollary
  // Proven bound on Q(anchor) - C(anchor). Equals eta except for the
  // variable-set l2 cut, whose anchor gap is at most eps + l2.
  double anchor_gap_bound = 0.0;

  double Eval(const Vector& x) const {
    return value_at_anchor + slope.dot(x - anchor);
  }
};

// The second-stage problem at an anchor plus the constants the inexact
// cuts need. Unset constants are reported as missing when a variant needs
// them.
struct CutProblemData {
  SecondStage stage;
  Scenario scen;
  Vector anchor;
  FirstStageSet first_stage = FirstStageSet::Simplex(1);
  std::optional<double> alpha;             // strong convexity of f(., x)
  std::optional<double> alpha_d;           // strong concavity of the dual
  std::optional<double> m1;                // Lipschitz of grad_x f in y
  std::optional<double> m2;                // Lipschitz of grad_x g_i in y
  std::optional<double> diam_x;            // diameter of the first-stage set
  std::optional<double> u_grad;            // max_i ||grad_x g_i(y_hat, x)||
  std::optional<double> multiplier_bound;  // upper bound on optimal mu
};

// First-stage set paired with each family: the simplex for the simplex
// stage, the unit ball around x0 for the ball stage.
inline FirstStageSet FirstStageSetFor(const SecondStage& stage) {
  if (const auto* s = std::get_if<SimplexStage>(&stage)) {
    return FirstStageSet::Simplex(s->n);
  }
  return FirstStageSet::Ball(std::get<BallStage>(stage).x0, 1.0);
}

// Fills every constant from instance data:
//   alpha = lambda_min(S3), M1 = ||S2||, M2 = 0 (grad_x g does not depend
//   on y), U = ||x - x0||, and for the ball the multiplier bound and the
//   quad-quad dual constant.
inline CutProblemData MakeCutData(const SecondStage& stage,
                                  const Scenario& scen, const Vector& anchor) {
  CutProblemData data;
  data.stage = stage;
  data.scen = scen;
  data.anchor = anchor;
  data.first_stage = FirstStageSetFor(stage);
  internal::Require(anchor.size() == StageDim(stage),
                    "MakeCutData: anchor dimension mismatch");
  data.alpha = scen.s3_lambda_min();
  data.m1 = scen.s2_norm();
  data.m2 = 0.0;
  data.diam_x = data.first_stage.Diameter();
  if (const auto* ball = std::get_if<BallStage>(&stage)) {
    data.u_grad = (anchor - ball->x0).norm();
    data.multiplier_bound = MultiplierBound(*ball, anchor, scen);
    if (ReformulateBall(*ball, anchor, scen).a0.norm() > 1e-10) {
      data.alpha_d = BallStageConcavity(*ball, anchor, scen).alpha_d;
    }
  } else {
    data.u_grad = 0.0;
  }
  return data;
}

namespace internal {

inline double Need(const std::optional<double>& value, const char* name) {
  if (!value) throw MissingConstant(std::string("cut: missing constant ") + name);
  return *value;
}

inline double Mu(const SolveReport& report) {
  return report.mu.size() > 0 ? report.mu(0) : 0.0;
}

inline void CheckReport(const CutProblemData& data, const SolveReport& report) {
  Require(report.x2.size() == StageDim(data.stage),
          "cut: report dimension does not match stage");
  Require(data.anchor.size() == StageDim(data.stage),
          "cut: anchor dimension does not match stage");
  Require(std::isfinite(report.eps_certified) && report.eps_certified >= 0.0,
          "cut: report eps must be finite and >= 0");
  Require(report.mu.size() == 0 || report.mu.minCoeff() >= 0.0,
          "cut: multipliers must be >= 0");
}

// L(y, mu) = f(y, x) + mu g(y, x) and its partial gradients.
inline double LagrangianValue(const CutProblemData& d, const Vector& y,
                              double mu) {
  double value = d.scen.Objective(d.anchor, y);
  if (const auto* ball = std::get_if<BallStage>(&d.stage)) {
    value += mu * ball->Constraint(d.anchor, y);
  }
  return value;
}

inline Vector LagrangianGradX(const CutProblemData& d, const Vector& y,
                              double mu) {
  Vector g = d.scen.GradX(d.anchor, y);
  if (const auto* ball = std::get_if<BallStage>(&d.stage)) {
    g += mu * ball->ConstraintGradX(d.anchor);
  }
  return g;
}

inline Vector LagrangianGradY(const CutProblemData& d, const Vector& y,
                              double mu) {
  Vector g = d.scen.GradY(d.anchor, y);
  if (const auto* ball = std::get_if<BallStage>(&d.stage)) {
    g += mu * (y - ball->y0);
  }
  return g;
}

inline double GapOverY(const CutProblemData& d, const Vector& g,
                       const Vector& y_hat) {
  return std::visit([&](const auto& s) { return s.GapOverSet(g, y_hat); },
                    d.stage);
}

inline Cut MakeCut(const CutProblemData& d, double value, Vector slope,
                   double eta, CutVariant variant) {
  Cut cut;
  cut.anchor = d.anchor;
  cut.value_at_anchor = value;
  cut.slope = std::move(slope);
  cut.eta = eta;
  cut.variant = variant;
  cut.anchor_gap_bound = eta;
  return cut;
}

inline void RequireFixedSet(const CutProblemData& d, const char* who) {
  const StageStructure s = StageStructureOf(d.stage);
  if (s.p > 0 || s.q > 0) {
    throw StructureMismatch(std::string(who) +
                            ": coupling constraints present (p or q > 0), "
                            "use a variable-set variant");
  }
}

// 2 max(||B^T||, sqrt(p) U) / sqrt(alpha_D), or 0 without coupling rows.
inline double DualTerm(const CutProblemData& d, const StageStructure& s,
                       double scale) {
  const double coupling =
      std::max(s.norm_bt, std::sqrt(static_cast<double>(s.p)) *
                              (s.p > 0 ? Need(d.u_grad, "U") : 0.0));
  if (coupling == 0.0) return 0.0;
  const double alpha_d = Need(d.alpha_d, "alpha_D");
  if (!(alpha_d > 0.0)) throw InvalidInput("cut: alpha_D must be positive");
  return scale * coupling / std::sqrt(alpha_d);
}

inline double PositiveAlpha(const CutProblemData& d) {
  const double alpha = Need(d.alpha, "alpha");
  if (!(alpha > 0.0)) throw InvalidInput("cut: alpha must be positive");
  return alpha;
}

}  // namespace internal

// Tangent plane at an exact solution; slope is grad_x of the Lagrangian.
inline Cut ExactCut(const CutProblemData& data, const SolveReport& report) {
  internal::CheckReport(data, report);
  if (report.eps_certified > 1e-10) {
    throw InvalidInput("ExactCut: report is not exact (eps > 1e-10), use an "
                       "inexact variant");
  }
  const double mu = internal::Mu(report);
  return internal::MakeCut(data, report.primal_value,
                           internal::LagrangianGradX(data, report.x2, mu), 0.0,
                           CutVariant::kExact);
}

// Fixed feasible set: eta = l1 = max_y <grad_y f(y_hat), y_hat - y>.
inline Cut CutFixedL1(const CutProblemData& data, const SolveReport& report) {
  internal::CheckReport(data, report);
  internal::RequireFixedSet(data, "CutFixedL1");
  const Vector g = data.scen.GradY(data.anchor, report.x2);
  const double eta = internal::GapOverY(data, g, report.x2);
  return internal::MakeCut(data, data.scen.Objective(data.anchor, report.x2) - eta,
                           data.scen.GradX(data.anchor, report.x2), eta,
                           CutVariant::kFixedL1);
}

// Fixed feasible set: eta = eps + M1 Diam(X) sqrt(2 eps / alpha).
inline Cut CutFixedStrong(const CutProblemData& data, const SolveReport& report) {
  internal::CheckReport(data, report);
  internal::RequireFixedSet(data, "CutFixedStrong");
  const double alpha = internal::PositiveAlpha(data);
  const double m1 = internal::Need(data.m1, "M1");
  const double diam = internal::Need(data.diam_x, "Diam(X)");
  const double eps = report.eps_certified;
  const double eta = eps + m1 * diam * std::sqrt(2.0 * eps / alpha);
  return internal::MakeCut(data, data.scen.Objective(data.anchor, report.x2) - eta,
                           data.scen.GradX(data.anchor, report.x2), eta,
                           CutVariant::kFixedStrong);
}

// Variable feasible set: eta = l2 = max_y <grad_y L(y_hat, mu), y_hat - y>,
// value at the anchor L(y_hat, mu) - l2.
inline Cut CutVariableL2(const CutProblemData& data, const SolveReport& report) {
  internal::CheckReport(data, report);
  const double mu = internal::Mu(report);
  const Vector gy = internal::LagrangianGradY(data, report.x2, mu);
  const double eta = internal::GapOverY(data, gy, report.x2);
  Cut cut = internal::MakeCut(
      data, internal::LagrangianValue(data, report.x2, mu) - eta,
      internal::LagrangianGradX(data, report.x2, mu), eta,
      CutVariant::kVariableL2);
  cut.anchor_gap_bound = report.eps_certified + eta;
  return cut;
}

// Variable feasible set, strong convexity of f and strong concavity of the
// dual: eta = eps + ((M1 + M2 U) sqrt(2/alpha)
//                    + 2 max(||B^T||, sqrt(p) U) / sqrt(alpha_D)) Diam sqrt(eps).
inline Cut CutVariableStrong(const CutProblemData& data,
                             const SolveReport& report) {
  internal::CheckReport(data, report);
  const StageStructure s = StageStructureOf(data.stage);
  const double alpha = internal::PositiveAlpha(data);
  const double m1 = internal::Need(data.m1, "M1");
  const double diam = internal::Need(data.diam_x, "Diam(X)");
  double m2_term = 0.0;
  if (s.p > 0) {
    m2_term = internal::Need(data.m2, "M2") *
              internal::Need(data.multiplier_bound, "multiplier bound");
  }
  const double eps = report.eps_certified;
  const double factor = (m1 + m2_term) * std::sqrt(2.0 / alpha) +
                        internal::DualTerm(data, s, 2.0);
  const double eta = eps + factor * diam * std::sqrt(eps);
  const double mu = internal::Mu(report);
  return internal::MakeCut(data, data.scen.Objective(data.anchor, report.x2) - eta,
                           internal::LagrangianGradX(data, report.x2, mu), eta,
                           CutVariant::kVariableStrong);
}

// The nine structural specializations 'a'..'i'. Hypotheses are checked
// against the stage structure; violations name the offending flag.
inline Cut CutCorollary(char which, const CutProblemData& data,
                        const SolveReport& report) {
  internal::CheckReport(data, report);
  internal::Require(which >= 'a' && which <= 'i',
                    "CutCorollary: case must be one of a..i");
  const StageStructure s = StageStructureOf(data.stage);
  const std::string tag = std::string("CutCorollary(") + which + "): ";
  const bool needs_f_sep = which == 'b' || which == 'c' || which == 'f' ||
                           which == 'g' || which == 'i';
  const bool needs_g_sep =
      which == 'a' || which == 'c' || which == 'e' || which == 'g';
  const bool no_equalities = which >= 'd' && which <= 'g';
  const bool no_inequalities = which == 'h' || which == 'i';
  if (needs_f_sep && !s.f_separable) {
    throw StructureMismatch(tag + "requires f_separable");
  }
  if (needs_g_sep && !s.g_separable) {
    throw StructureMismatch(tag + "requires g_separable");
  }
  if (no_equalities && s.q > 0) {
    throw StructureMismatch(tag + "requires q == 0 (no equality coupling)");
  }
  if (no_inequalities && s.p > 0) {
    throw StructureMismatch(tag + "requires p == 0 (no inequality coupling)");
  }
  if (!no_inequalities && s.p == 0) {
    throw StructureMismatch(tag + "requires p >= 1 (inequality coupling)");
  }

  const double eps = report.eps_certified;
  const double diam = internal::Need(data.diam_x, "Diam(X)");
  const double root2eps = std::sqrt(2.0 * eps);
  auto m1_over_root_alpha = [&] {
    return internal::Need(data.m1, "M1") / std::sqrt(internal::PositiveAlpha(data));
  };
  auto m2_ubar_over_root_alpha = [&] {
    return internal::Need(data.m2, "M2") *
           internal::Need(data.multiplier_bound, "multiplier bound") /
           std::sqrt(internal::PositiveAlpha(data));
  };
  // sqrt(p) U / sqrt(alpha_D) and ||B^T|| / sqrt(alpha_D), zero when the
  // numerator vanishes so alpha_D is only required when it matters.
  auto over_root_alpha_d = [&](double numerator) {
    if (numerator == 0.0) return 0.0;
    const double alpha_d = internal::Need(data.alpha_d, "alpha_D");
    if (!(alpha_d > 0.0)) throw InvalidInput("cut: alpha_D must be positive");
    return numerator / std::sqrt(alpha_d);
  };
  const double root_p_u =
      s.p > 0 ? std::sqrt(static_cast<double>(s.p)) *
                    internal::Need(data.u_grad, "U")
              : 0.0;
  const double coupling = std::max(s.norm_bt, root_p_u);

  double eta = eps;
  switch (which) {
    case 'a':
      eta += (m1_over_root_alpha() +
              std::sqrt(2.0) * over_root_alpha_d(coupling)) * diam * root2eps;
      break;
    case 'b':
      eta += (m2_ubar_over_root_alpha() +
              std::sqrt(2.0) * over_root_alpha_d(coupling)) * diam * root2eps;
      break;
    case 'c':
      eta += 2.0 * over_root_alpha_d(coupling) * diam * std::sqrt(eps);
      break;
    case 'd':
      eta += (m1_over_root_alpha() + m2_ubar_over_root_alpha() +
              over_root_alpha_d(root_p_u)) * diam * root2eps;
      break;
    case 'e':
      eta += (m1_over_root_alpha() + over_root_alpha_d(root_p_u)) * diam *
             root2eps;
      break;
    case 'f':
      eta += (m2_ubar_over_root_alpha() + over_root_alpha_d(root_p_u)) * diam *
             root2eps;
      break;
    case 'g':
      eta += diam * root2eps * over_root_alpha_d(root_p_u);
      break;
    case 'h':
      eta += (m1_over_root_alpha() + over_root_alpha_d(s.norm_bt)) * diam *
             root2eps;
      break;
    case 'i':
      eta += over_root_alpha_d(s.norm_bt) * root2eps * diam;
      break;
  }
  // Under each case's separability the printed slope coincides with the
  // Lagrangian gradient: grad_x f = grad f1 and grad_x g = grad k.
  const double mu = internal::Mu(report);
  Cut cut = internal::MakeCut(
      data, data.scen.Objective(data.anchor, report.x2) - eta,
      internal::LagrangianGradX(data, report.x2, mu), eta,
      CutVariant::kCorollary);
  cut.corollary_case = which;
  return cut;
}

struct CutValidation {
  double max_violation = -std::numeric_limits<double>::infinity();
  double anchor_gap = 0.0;  // Q(anchor) - C(anchor)
  double eta = 0.0;
  double anchor_gap_bound = 0.0;
  int samples = 0;
};

// Uniform-ish feasible first-stage points: Dirichlet(1) on the simplex,
// uniform in the ball.
inline Vector SampleFirstStage(const FirstStageSet& set, RngStream& rng) {
  const int n = set.dim();
  if (set.is_simplex()) {
    Vector e(n);
    for (int i = 0; i < n; ++i) e(i) = -std::log(rng.Uniform());
    return e / e.sum();
  }
  Vector dir(n);
  for (int i = 0; i < n; ++i) dir(i) = rng.Normal();
  const double r = set.radius() * std::pow(rng.Uniform(), 1.0 / n);
  return set.center() + (r / dir.norm()) * dir;
}

// Compares the cut against oracle values of Q at sampled feasible points
// and at the anchor.
inline CutValidation ValidateCut(const Cut& cut, const CutProblemData& data,
                                 int n_samples, RngStream& rng) {
  internal::Require(n_samples >= 0, "ValidateCut: n_samples must be >= 0");
  CutValidation out;
  out.eta = cut.eta;
  out.anchor_gap_bound = cut.anchor_gap_bound;
  out.samples = n_samples;
  for (int k = 0; k < n_samples; ++k) {
    const Vector x = SampleFirstStage(data.first_stage, rng);
    const double q = OracleSolve(data.stage, x, data.scen).primal_value;
    out.max_violation = std::max(out.max_violation, cut.Eval(x) - q);
  }
  const double q_anchor =
      OracleSolve(data.stage, data.anchor, data.scen).primal_value;
  out.anchor_gap = q_anchor - cut.Eval(data.anchor);
  return out;
}

}  // namespace ismd

#endif  // ISMD_CUTS_HPP_
