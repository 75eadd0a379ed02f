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

// Strong-concavity constants of Lagrangian dual functions and a numeric
// checker for a claimed constant on an interval.

#ifndef ISMD_STRONG_CONCAVITY_HPP_
#define ISMD_STRONG_CONCAVITY_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ismd/error.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"

namespace ismd {

enum class ConcavityFormula {
  kLinearConstraints,
  kQuadObjective,
  kQuadQuad,
  kLocalTheorem,
};

enum class ConcavityRegion {
  kWholeSpace,    // all of R^q
  kInterval,      // [0, mu_bar]
  kNeighborhood,  // near the optimal dual pair; no quantitative radius
};

struct ConcavityCertificate {
  double alpha_d = 0.0;
  ConcavityRegion region = ConcavityRegion::kWholeSpace;
  double mu_bar = 0.0;  // meaningful for kInterval only
  ConcavityFormula formula = ConcavityFormula::kLinearConstraints;
};

// lambda_min(A A^T) / L for min f(x) s.t. Ax = b with L-smooth f.
inline ConcavityCertificate LinearConstraintsConstant(const Matrix& a,
                                                      double lipschitz) {
  internal::Require(a.rows() >= 1 && a.cols() >= 1 && a.allFinite(),
                    "LinearConstraintsConstant: invalid A");
  internal::Require(std::isfinite(lipschitz) && lipschitz > 0.0,
                    "LinearConstraintsConstant: L must be positive");
  const double low =
      EigenExtremesOf(SymMatrix(Matrix(a * a.transpose()))).min;
  if (!(low > 1e-12)) {
    throw InvalidInput("LinearConstraintsConstant: rows of A are dependent");
  }
  return {low / lipschitz, ConcavityRegion::kWholeSpace, 0.0,
          ConcavityFormula::kLinearConstraints};
}

// Quadratic objective 1/2 x^T Q0 x + ...: L = lambda_max(Q0).
inline ConcavityCertificate QuadObjectiveConstant(const Matrix& a,
                                                  const SymMatrix& q0) {
  const EigenExtremes q = EigenExtremesOf(q0);
  if (!(q.min > 0.0)) {
    throw NotPositiveDefinite("QuadObjectiveConstant: Q0 must be positive "
                              "definite");
  }
  ConcavityCertificate cert = LinearConstraintsConstant(a, q.max);
  cert.formula = ConcavityFormula::kQuadObjective;
  return cert;
}

// Quadratic objective with one quadratic constraint, on the multiplier
// interval [0, mu_bar], mu_bar = (lower_bound - f_x0) / g1_x0.
inline ConcavityCertificate QuadQuadConstant(const SymMatrix& q0,
                                             const SymMatrix& q1,
                                             const Vector& a0,
                                             const Vector& a1,
                                             double lower_bound, double f_x0,
                                             double g1_x0) {
  const int n = q0.order();
  internal::Require(q1.order() == n && a0.size() == n && a1.size() == n,
                    "QuadQuadConstant: dimension mismatch");
  internal::Require(a0.allFinite() && a1.allFinite(),
                    "QuadQuadConstant: non-finite vector");
  internal::Require(std::isfinite(lower_bound) && std::isfinite(f_x0),
                    "QuadQuadConstant: non-finite bound");
  if (!(g1_x0 < 0.0)) {
    throw SlaterViolation("QuadQuadConstant: g1(x0) must be negative");
  }
  internal::Require(lower_bound <= f_x0,
                    "QuadQuadConstant: lower bound exceeds f(x0)");
  Eigen::SelfAdjointEigenSolver<Matrix> q1_eig(q1.matrix());
  const Vector d = q1_eig.eigenvalues();
  if (!(d(0) > 0.0)) {
    throw NotPositiveDefinite("QuadQuadConstant: Q1 must be positive definite");
  }
  if (!(EigenExtremesOf(q0).min > 0.0)) {
    throw NotPositiveDefinite("QuadQuadConstant: Q0 must be positive definite");
  }
  const Matrix& v = q1_eig.eigenvectors();
  const Matrix inv_sqrt =
      v * d.array().rsqrt().matrix().asDiagonal() * v.transpose();
  const Matrix q1_inv = v * d.cwiseInverse().asDiagonal() * v.transpose();
  const Vector a0_bar = a0 - q0.matrix() * (q1_inv * a1);
  if (a0_bar.norm() <= 1e-10 * (1.0 + a0.norm())) {
    throw InvalidInput("QuadQuadConstant: degenerate instance, a0 equals "
                       "Q0 Q1^{-1} a1");
  }
  const Vector a_tilde = inv_sqrt * a0_bar;
  const SymMatrix scaled(Matrix(inv_sqrt * q0.matrix() * inv_sqrt));
  const double mu_bar = std::max(0.0, (lower_bound - f_x0) / g1_x0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled.matrix());
  const Vector coords = eig.eigenvectors().transpose() * a_tilde;
  double alpha = 0.0;
  for (int i = 0; i < n; ++i) {
    alpha += coords(i) * coords(i) / std::pow(eig.eigenvalues()(i) + mu_bar, 3);
  }
  return {alpha, ConcavityRegion::kInterval, mu_bar,
          ConcavityFormula::kQuadQuad};
}

// alpha * lambda_underbar / (L_f + L_g U_eps)^2. Valid only near the optimal
// dual pair; lambda_underbar and U_eps come from the caller.
inline ConcavityCertificate LocalTheoremConstant(double alpha, double l_f,
                                                 double l_g, double u_eps,
                                                 double lambda_underbar) {
  internal::Require(alpha > 0.0 && l_f > 0.0 && u_eps > 0.0 &&
                        lambda_underbar > 0.0 && l_g >= 0.0,
                    "LocalTheoremConstant: inputs must be positive (L_g >= 0)");
  const double denom = l_f + l_g * u_eps;
  return {alpha * lambda_underbar / (denom * denom),
          ConcavityRegion::kNeighborhood, 0.0,
          ConcavityFormula::kLocalTheorem};
}

// The quad-quad constant specialized to the ball stage at x1:
// a0^T (S3 + U I)^{-3} a0 with U the multiplier bound.
inline ConcavityCertificate BallStageConcavity(const BallStage& stage,
                                               const Vector& x1,
                                               const Scenario& scen) {
  const BallReformulation r = ReformulateBall(stage, x1, scen);
  if (r.a0.norm() <= 1e-10) {
    throw InvalidInput("BallStageConcavity: degenerate instance, a0 = 0");
  }
  const double mu_bar = MultiplierBound(stage, x1, scen);
  const Vector w = scen.ShiftedSolve(mu_bar, r.a0);
  return {w.dot(scen.ShiftedSolve(mu_bar, w)), ConcavityRegion::kInterval,
          mu_bar, ConcavityFormula::kQuadQuad};
}

struct ConcavityCheck {
  bool passed = true;
  // Smallest value of theta(mid) - chord - alpha t(1-t)/2 (mu2-mu1)^2 + tol.
  double worst_midpoint_slack = std::numeric_limits<double>::infinity();
  // Smallest value of -alpha + tol - theta''_fd.
  double worst_curvature_slack = std::numeric_limits<double>::infinity();
  int checks = 0;
};

// Midpoint inequality on random triples and central second differences at
// random points, both with tol = 1e-6 (1 + |theta|).
inline ConcavityCheck VerifyConcavity(
    const std::function<double(double)>& theta, double lo, double hi,
    double alpha_d, int n_checks, RngStream& rng) {
  internal::Require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi,
                    "VerifyConcavity: invalid interval");
  internal::Require(n_checks >= 1, "VerifyConcavity: n_checks must be >= 1");
  ConcavityCheck out;
  const double width = hi - lo;
  if (width == 0.0) return out;
  auto tol = [](double value) { return 1e-6 * (1.0 + std::abs(value)); };
  for (int k = 0; k < n_checks; ++k) {
    const double m1 = rng.Uniform(lo, hi);
    const double m2 = rng.Uniform(lo, hi);
    const double t = rng.Uniform();
    const double mid = t * m1 + (1.0 - t) * m2;
    const double value = theta(mid);
    const double chord = t * theta(m1) + (1.0 - t) * theta(m2);
    const double slack = value - chord -
                         0.5 * alpha_d * t * (1.0 - t) * (m2 - m1) * (m2 - m1) +
                         tol(value);
    out.worst_midpoint_slack = std::min(out.worst_midpoint_slack, slack);
  }
  const double h = 1e-3 * width;
  for (int k = 0; k < n_checks; ++k) {
    const double m = rng.Uniform(lo + h, hi - h);
    const double center = theta(m);
    const double second = (theta(m + h) - 2.0 * center + theta(m - h)) / (h * h);
    const double slack = -alpha_d + tol(center) - second;
    out.worst_curvature_slack = std::min(out.worst_curvature_slack, slack);
  }
  out.checks = 2 * n_checks;
  out.passed = out.worst_midpoint_slack >= 0.0 && out.worst_curvature_slack >= 0.0;
  return out;
}

}  // namespace ismd

#endif  // ISMD_STRONG_CONCAVITY_HPP_
