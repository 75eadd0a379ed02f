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

// The two second-stage families: a strongly convex quadratic over the unit
// simplex, and the same quadratic over a ball whose radius couples to the
// first-stage decision. Both solvers return a certified accuracy.
//
// For z = (x1; x2) the objective is f(x2, x1) = 1/2 z^T S z + c^T z with
// S = [S1 S2; S2^T S3] and c = (c1; c2).

#ifndef ISMD_SECOND_STAGE_HPP_
#define ISMD_SECOND_STAGE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ismd/error.hpp"
#include "ismd/numkit.hpp"

namespace ismd {

// One realization of the second-stage data. Built either from a sample xi
// (S = xi xi^T + lambda I, c = xi) or from explicit blocks. The rank-one form
// keeps products at O(n).
class Scenario {
 public:
  static Scenario FromXi(const Vector& xi, double lambda_reg) {
    internal::Require(xi.size() >= 2 && xi.size() % 2 == 0,
                      "Scenario: xi must have even length 2n >= 2");
    internal::Require(xi.allFinite(), "Scenario: non-finite xi");
    internal::Require(std::isfinite(lambda_reg) && lambda_reg > 0.0,
                      "Scenario: lambda_reg must be positive");
    Scenario s;
    s.n_ = static_cast<int>(xi.size() / 2);
    s.rank_one_ = true;
    s.xi_ = xi;
    s.lambda_ = lambda_reg;
    s.c1_ = xi.head(s.n_);
    s.c2_ = xi.tail(s.n_);
    const double xi2_sq = s.c2_.squaredNorm();
    s.s3_min_ = s.n_ == 1 ? lambda_reg + xi2_sq : lambda_reg;
    s.s3_max_ = lambda_reg + xi2_sq;
    s.s_min_ = lambda_reg;
    s.s_max_ = lambda_reg + xi.squaredNorm();
    s.s2_norm_ = s.c1_.norm() * s.c2_.norm();
    return s;
  }

  static Scenario FromBlocks(const SymMatrix& s_full, const Vector& c) {
    internal::Require(s_full.order() >= 2 && s_full.order() % 2 == 0,
                      "Scenario: S must have even order 2n >= 2");
    internal::Require(c.size() == s_full.order(),
                      "Scenario: c must match the order of S");
    internal::Require(c.allFinite(), "Scenario: non-finite c");
    Scenario s;
    s.n_ = s_full.order() / 2;
    const int n = s.n_;
    s.s_ = s_full.matrix();
    s.c1_ = c.head(n);
    s.c2_ = c.tail(n);
    const EigenExtremes whole = EigenExtremesOf(s_full);
    if (whole.min <= 0.0) {
      throw NotPositiveDefinite("Scenario: S must be positive definite");
    }
    s.s_min_ = whole.min;
    s.s_max_ = whole.max;
    Eigen::SelfAdjointEigenSolver<Matrix> s3_eig(s.s_.bottomRightCorner(n, n));
    s.s3_values_ = s3_eig.eigenvalues();
    s.s3_vectors_ = s3_eig.eigenvectors();
    s.s3_min_ = s.s3_values_(0);
    s.s3_max_ = s.s3_values_(n - 1);
    s.s2_norm_ = SpectralNorm(s.s_.topRightCorner(n, n));
    return s;
  }

  int n() const { return n_; }
  bool rank_one() const { return rank_one_; }
  // The sample xi; empty for block-built scenarios.
  const Vector& xi() const { return xi_; }
  const Vector& c1() const { return c1_; }
  const Vector& c2() const { return c2_; }

  double s3_lambda_min() const { return s3_min_; }
  double s3_lambda_max() const { return s3_max_; }
  double s_lambda_min() const { return s_min_; }
  double s_lambda_max() const { return s_max_; }
  double s2_norm() const { return s2_norm_; }

  Vector S1Times(const Vector& x) const {
    if (rank_one_) return c1_ * c1_.dot(x) + lambda_ * x;
    return s_.topLeftCorner(n_, n_) * x;
  }
  Vector S2Times(const Vector& y) const {
    if (rank_one_) return c1_ * c2_.dot(y);
    return s_.topRightCorner(n_, n_) * y;
  }
  Vector S2TransposeTimes(const Vector& x) const {
    if (rank_one_) return c2_ * c1_.dot(x);
    return s_.topRightCorner(n_, n_).transpose() * x;
  }
  Vector S3Times(const Vector& y) const {
    if (rank_one_) return c2_ * c2_.dot(y) + lambda_ * y;
    return s_.bottomRightCorner(n_, n_) * y;
  }

  // (S3 + mu I)^{-1} v.
  Vector ShiftedSolve(double mu, const Vector& v) const {
    if (rank_one_) {
      const double base = lambda_ + mu;
      const double denom = base * (base + c2_.squaredNorm());
      return v / base - c2_ * (c2_.dot(v) / denom);
    }
    const Vector coords = s3_vectors_.transpose() * v;
    const Vector scaled =
        (coords.array() / (s3_values_.array() + mu)).matrix();
    return s3_vectors_ * scaled;
  }

  Matrix S1() const { return DenseS().topLeftCorner(n_, n_); }
  Matrix S2() const { return DenseS().topRightCorner(n_, n_); }
  Matrix S3() const { return DenseS().bottomRightCorner(n_, n_); }
  Matrix DenseS() const {
    if (!rank_one_) return s_;
    Matrix s = xi_ * xi_.transpose();
    s.diagonal().array() += lambda_;
    return s;
  }

  // f(y, x) with x the first-stage and y the second-stage decision.
  double Objective(const Vector& x, const Vector& y) const {
    return c1_.dot(x) + c2_.dot(y) +
           0.5 * (x.dot(S1Times(x)) + y.dot(S3Times(y))) +
           x.dot(S2Times(y));
  }
  Vector GradX(const Vector& x, const Vector& y) const {
    return c1_ + S1Times(x) + S2Times(y);
  }
  Vector GradY(const Vector& x, const Vector& y) const {
    return c2_ + S2TransposeTimes(x) + S3Times(y);
  }

 private:
  int n_ = 0;
  bool rank_one_ = false;
  Vector xi_;
  double lambda_ = 0.0;
  Matrix s_;
  Vector c1_, c2_;
  Vector s3_values_;
  Matrix s3_vectors_;
  double s3_min_ = 0.0, s3_max_ = 0.0;
  double s_min_ = 0.0, s_max_ = 0.0;
  double s2_norm_ = 0.0;
};

// Structural flags consumed by the cut constructors.
struct StageStructure {
  bool f_separable = false;  // f(y, x) = f1(x) + f2(y)
  bool g_separable = false;  // g(y, x) = k(x) + h(y)
  int p = 0;                 // nonlinear inequality constraints
  int q = 0;                 // linear equality coupling rows
  double norm_bt = 0.0;      // ||B^T|| of the equality coupling
};

// min over the unit simplex in R^n of f(., x1).
struct SimplexStage {
  int n = 1;
  double lambda_reg = 2.0;

  StageStructure structure() const { return {false, false, 0, 0, 0.0}; }
  // Diameter of the set carrying the second-stage variable.
  double y_diameter() const { return n == 1 ? 0.0 : std::sqrt(2.0); }
  // min over the set of <d, y>.
  double SupportMin(const Vector& d) const { return d.minCoeff(); }
  // max over the set of <d, y_hat - y>, computed without cancellation.
  double GapOverSet(const Vector& d, const Vector& y_hat) const {
    const double low = d.minCoeff();
    return std::max(0.0, y_hat.dot((d.array() - low).matrix()));
  }
};

// min f(., x1) over {y : 1/2 ||y - y0||^2 + 1/2 ||x1 - x0||^2 - R^2/2 <= 0}.
class BallStage {
 public:
  BallStage() = default;
  BallStage(const Vector& x0, const Vector& y0, double radius,
            double lambda_reg)
      : n(static_cast<int>(x0.size())),
        x0(x0),
        y0(y0),
        R(radius),
        lambda_reg(lambda_reg) {
    internal::Require(n >= 1 && y0.size() == n,
                      "BallStage: x0 and y0 must share a positive dimension");
    internal::Require(x0.allFinite() && y0.allFinite(),
                      "BallStage: non-finite center");
    internal::Require(std::isfinite(lambda_reg) && lambda_reg > 0.0,
                      "BallStage: lambda_reg must be positive");
    // ||x1 - x0|| <= 1 for every first-stage point, so R > 1 keeps y0 a
    // Slater point for all of them.
    if (!(std::isfinite(radius) && radius > 1.0)) {
      throw SlaterViolation("BallStage: R must exceed 1 for Slater at y0");
    }
  }

  int n = 0;
  Vector x0;
  Vector y0;
  double R = 0.0;
  double lambda_reg = 0.0;

  StageStructure structure() const { return {false, true, 1, 0, 0.0}; }
  double y_diameter() const { return 2.0 * R; }
  double SupportMin(const Vector& d) const {
    return d.dot(y0) - R * d.norm();
  }
  double GapOverSet(const Vector& d, const Vector& y_hat) const {
    return std::max(0.0, d.dot(y_hat - y0) + R * d.norm());
  }

  double Constraint(const Vector& x1, const Vector& y) const {
    return 0.5 * (y - y0).squaredNorm() + 0.5 * (x1 - x0).squaredNorm() -
           0.5 * R * R;
  }
  Vector ConstraintGradX(const Vector& x1) const { return x1 - x0; }
};

using SecondStage = std::variant<SimplexStage, BallStage>;

struct SolveReport {
  Vector x2;
  Vector lambda;  // equality multipliers; empty for both families
  Vector mu;      // inequality multipliers
  double eps_certified = 0.0;
  double primal_value = 0.0;
  double dual_value = 0.0;
  int iterations = 0;
  bool reached_target = false;
};

inline constexpr double kOracleEps = 1e-12;

namespace internal {

// Without a cap the solvers still stop after this many iterations, or once
// the certificate has not improved for kStallWindow iterations.
inline constexpr int kMaxSolverIterations = 200000;
inline constexpr int kStallWindow = 2000;

inline void CheckSolveArgs(int n, const Vector& x1, const Scenario& scen,
                           double eps, std::optional<int> iter_cap) {
  Require(scen.n() == n, "solve: scenario dimension does not match stage");
  Require(x1.size() == n, "solve: x1 dimension does not match stage");
  Require(x1.allFinite(), "solve: non-finite x1");
  Require(std::isfinite(eps) && eps > 0.0, "solve: eps must be positive");
  Require(!iter_cap || *iter_cap >= 0, "solve: iter_cap must be >= 0");
}

}  // namespace internal

// Accelerated projected gradient with adaptive restart. The certificate
// l1(y) = sum y_i (g_i - min g) bounds f(y) - Q from above; the best
// certified iterate is returned, so eps_certified is monotone in the cap.
inline SolveReport SolveSimplexStage(const SimplexStage& stage,
                                     const Vector& x1, const Scenario& scen,
                                     double eps,
                                     std::optional<int> iter_cap = {},
                                     const Vector* warm_start = nullptr) {
  internal::CheckSolveArgs(stage.n, x1, scen, eps, iter_cap);
  internal::Require(x1.minCoeff() >= -1e-10 && std::abs(x1.sum() - 1.0) <= 1e-9,
                    "SolveSimplexStage: x1 must lie in the simplex");
  const int n = stage.n;
  const Vector linear = scen.c2() + scen.S2TransposeTimes(x1);
  auto grad = [&](const Vector& y) -> Vector {
    return scen.S3Times(y) + linear;
  };

  Vector y = warm_start != nullptr ? ProjectSimplex(*warm_start)
                                   : Vector::Constant(n, 1.0 / n);
  Vector g = grad(y);
  Vector best = y;
  double best_cert = stage.GapOverSet(g, y);
  const int limit =
      iter_cap ? *iter_cap : internal::kMaxSolverIterations;
  const double lip = scen.s3_lambda_max();
  const double ratio = std::sqrt(scen.s3_lambda_min() / lip);
  const double momentum = (1.0 - ratio) / (1.0 + ratio);

  Vector v = y;
  int iterations = 0;
  int since_improvement = 0;
  while (best_cert > eps && iterations < limit) {
    ++iterations;
    const Vector gv = grad(v);
    const Vector y_next = ProjectSimplex(v - gv / lip);
    g = grad(y_next);
    const double cert = stage.GapOverSet(g, y_next);
    if (!std::isfinite(cert)) {
      throw NumericalFailure("SolveSimplexStage: non-finite certificate");
    }
    if (cert < best_cert) {
      best_cert = cert;
      best = y_next;
      since_improvement = 0;
    } else if (!iter_cap && ++since_improvement >= internal::kStallWindow) {
      break;
    }
    const Vector step = y_next - y;
    if ((v - y_next).dot(step) > 0.0) {
      v = y_next;
    } else {
      v = y_next + momentum * step;
    }
    y = y_next;
  }

  // Active-set refinement for high-accuracy requests: solve the KKT system
  // S3_SS y_S + linear_S = nu 1, 1^T y_S = 1 on the support of the best
  // iterate, dropping negative entries. Kept only if it certifies better.
  if (!iter_cap && eps <= 1e-10 && n > 1) {
    const Matrix s3 = scen.S3();
    std::vector<int> support;
    for (int i = 0; i < n; ++i) {
      if (best(i) > 0.0) support.push_back(i);
    }
    for (int round = 0; round < n && !support.empty(); ++round) {
      const int k = static_cast<int>(support.size());
      Matrix kkt = Matrix::Zero(k + 1, k + 1);
      Vector rhs(k + 1);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) kkt(i, j) = s3(support[i], support[j]);
        kkt(i, k) = -1.0;
        kkt(k, i) = 1.0;
        rhs(i) = -linear(support[i]);
      }
      rhs(k) = 1.0;
      const Vector sol = kkt.partialPivLu().solve(rhs);
      if (!sol.allFinite()) break;
      Vector candidate = Vector::Zero(n);
      std::vector<int> positive;
      for (int i = 0; i < k; ++i) {
        candidate(support[i]) = sol(i);
        if (sol(i) > 0.0) positive.push_back(support[i]);
      }
      if (static_cast<int>(positive.size()) < k) {
        support = positive;
        continue;
      }
      const double cert = stage.GapOverSet(grad(candidate), candidate);
      if (cert < best_cert) {
        best_cert = cert;
        best = candidate;
      }
      break;
    }
  }

  SolveReport report;
  report.x2 = best;
  report.lambda = Vector(0);
  report.mu = Vector(0);
  report.eps_certified = best_cert;
  report.primal_value = scen.Objective(x1, best);
  report.dual_value = report.primal_value - best_cert;
  report.iterations = iterations;
  report.reached_target = best_cert <= eps;
  return report;
}

// Data of the ball stage at a fixed x1 after the shift z = y - y0:
//   f = 1/2 z^T S3 z + a0^T z + b0,   g = 1/2 ||z||^2 + b1.
struct BallReformulation {
  Vector a0;
  double b0 = 0.0;
  double b1 = 0.0;
};

inline BallReformulation ReformulateBall(const BallStage& stage,
                                         const Vector& x1,
                                         const Scenario& scen) {
  internal::Require(scen.n() == stage.n && x1.size() == stage.n,
                    "ReformulateBall: dimension mismatch");
  const Vector linear = scen.c2() + scen.S2TransposeTimes(x1);
  BallReformulation r;
  r.a0 = linear + scen.S3Times(stage.y0);
  r.b0 = 0.5 * x1.dot(scen.S1Times(x1)) + scen.c1().dot(x1) +
         stage.y0.dot(linear) + 0.5 * stage.y0.dot(scen.S3Times(stage.y0));
  r.b1 = 0.5 * ((x1 - stage.x0).squaredNorm() - stage.R * stage.R);
  return r;
}

// theta(mu) = -1/2 a0^T (S3 + mu I)^{-1} a0 + b0 + mu b1.
inline double DualFunctionValue(const BallStage& stage, const Vector& x1,
                                const Scenario& scen, double mu) {
  internal::Require(std::isfinite(mu) && mu >= 0.0,
                    "DualFunctionValue: mu must be >= 0");
  const BallReformulation r = ReformulateBall(stage, x1, scen);
  return -0.5 * r.a0.dot(scen.ShiftedSolve(mu, r.a0)) + r.b0 + mu * r.b1;
}

// Lower bound on Q(x1) valid over the whole ball of radius R around (x0; y0).
inline double BallValueLowerBound(const BallStage& stage,
                                  const Scenario& scen) {
  const double center =
      std::sqrt(stage.x0.squaredNorm() + stage.y0.squaredNorm());
  const double c_norm =
      std::sqrt(scen.c1().squaredNorm() + scen.c2().squaredNorm());
  const double near = std::max(center - stage.R, 0.0);
  return 0.5 * scen.s_lambda_min() * near * near - (center + stage.R) * c_norm;
}

// Upper bound on the optimal multiplier, (L - f(y0, x1)) / g(y0, x1).
inline double MultiplierBound(const BallStage& stage, const Vector& x1,
                              const Scenario& scen,
                              std::optional<double> lower_bound = {}) {
  const BallReformulation r = ReformulateBall(stage, x1, scen);
  if (!(r.b1 < 0.0)) {
    throw SlaterViolation("MultiplierBound: g(y0, x1) must be negative");
  }
  const double low = lower_bound ? *lower_bound
                                 : BallValueLowerBound(stage, scen);
  internal::Require(std::isfinite(low), "MultiplierBound: non-finite bound");
  return std::max(0.0, (low - r.b0) / r.b1);
}

// Maximizes the one-dimensional dual by safeguarded Newton on the secular
// equation 1/||w(mu)|| = 1/rho, w(mu) = (S3 + mu I)^{-1} a0. The primal
// candidate y(mu) = y0 - w(mu) is pulled radially onto the ball when it is
// infeasible; the certificate is the exact gap f(y_hat) - theta(mu).
inline SolveReport SolveBallStage(const BallStage& stage, const Vector& x1,
                                  const Scenario& scen, double eps,
                                  std::optional<int> iter_cap = {}) {
  internal::CheckSolveArgs(stage.n, x1, scen, eps, iter_cap);
  internal::Require((x1 - stage.x0).norm() <= 1.0 + 1e-10,
                    "SolveBallStage: x1 must satisfy ||x1 - x0|| <= 1");
  const BallReformulation r = ReformulateBall(stage, x1, scen);
  if (!(r.b1 < 0.0)) {
    throw SlaterViolation("SolveBallStage: y0 is not a Slater point");
  }
  const double rho = std::sqrt(-2.0 * r.b1);

  SolveReport report;
  report.lambda = Vector(0);
  report.mu = Vector::Zero(1);
  if (r.a0.squaredNorm() == 0.0) {
    report.x2 = stage.y0;
    report.primal_value = r.b0;
    report.dual_value = r.b0;
    report.reached_target = true;
    return report;
  }

  struct Candidate {
    double mu;
    Vector w;
    Vector y_hat;
    double gap;
  };
  auto evaluate = [&](double mu) {
    Candidate c{mu, scen.ShiftedSolve(mu, r.a0), Vector(), 0.0};
    const double w_norm = c.w.norm();
    Vector z_hat = -c.w;
    // On the sphere g(y_hat) = 0 exactly; evaluating it would only add
    // rounding of order mu R^2 eps_mach to the gap.
    double g_hat = 0.0;
    if (w_norm > rho) {
      z_hat *= rho / w_norm;
    } else {
      g_hat = 0.5 * z_hat.squaredNorm() + r.b1;
    }
    c.y_hat = stage.y0 + z_hat;
    const Vector d = z_hat + c.w;  // y_hat - y(mu)
    c.gap = std::max(
        0.0, 0.5 * (d.dot(scen.S3Times(d)) + mu * d.squaredNorm()) -
                 mu * std::min(g_hat, 0.0));
    if (!std::isfinite(c.gap)) {
      throw NumericalFailure("SolveBallStage: non-finite duality gap");
    }
    return c;
  };

  Candidate best = evaluate(0.0);
  const int limit = iter_cap ? *iter_cap : internal::kMaxSolverIterations;
  int iterations = 0;
  // Near-exact requests keep iterating past the gap target until mu stops
  // moving, so first-order quantities at y_hat (l2, slopes) converge too.
  const bool polish = !iter_cap && eps <= 1e-10;
  auto better = [&](const Candidate& c) {
    if (c.gap != best.gap) return c.gap < best.gap;
    return std::abs(c.w.norm() - rho) < std::abs(best.w.norm() - rho);
  };
  if (best.w.norm() > rho) {
    double lo = 0.0;
    double hi = MultiplierBound(stage, x1, scen);
    double mu = 0.0;
    Vector w = best.w;
    int polish_steps = 0;
    while ((best.gap > eps || polish) && iterations < limit) {
      if (best.gap <= eps && ++polish_steps > 20) break;
      ++iterations;
      const double w_norm = w.norm();
      const double psi = 1.0 / w_norm - 1.0 / rho;
      if (psi < 0.0) lo = std::max(lo, mu); else hi = std::min(hi, mu);
      const double slope =
          w.dot(scen.ShiftedSolve(mu, w)) / (w_norm * w_norm * w_norm);
      double next = mu - psi / slope;
      if (!std::isfinite(next) || next <= lo || next >= hi) {
        next = 0.5 * (lo + hi);
      }
      if (next == mu) break;
      mu = next;
      const Candidate c = evaluate(mu);
      w = c.w;
      if (better(c)) best = c;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi &&
          !iter_cap) {
        break;
      }
    }
  }
  report.x2 = best.y_hat;
  report.mu(0) = best.mu;
  report.eps_certified = best.gap;
  report.primal_value = scen.Objective(x1, best.y_hat);
  report.dual_value = report.primal_value - best.gap;
  report.iterations = iterations;
  report.reached_target = best.gap <= eps;
  return report;
}

inline SolveReport Solve(const SecondStage& stage, const Vector& x1,
                         const Scenario& scen, double eps,
                         std::optional<int> iter_cap = {}) {
  if (const auto* s = std::get_if<SimplexStage>(&stage)) {
    return SolveSimplexStage(*s, x1, scen, eps, iter_cap);
  }
  return SolveBallStage(std::get<BallStage>(stage), x1, scen, eps, iter_cap);
}

// High-accuracy reference solve: eps = 1e-12, no cap.
inline SolveReport OracleSolve(const SecondStage& stage, const Vector& x1,
                               const Scenario& scen) {
  return Solve(stage, x1, scen, kOracleEps);
}

inline int StageDim(const SecondStage& stage) {
  return std::visit([](const auto& s) { return s.n; }, stage);
}

inline StageStructure StageStructureOf(const SecondStage& stage) {
  return std::visit([](const auto& s) { return s.structure(); }, stage);
}

}  // namespace ismd

#endif  // ISMD_SECOND_STAGE_HPP_
