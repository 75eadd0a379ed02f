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

// Inexact stochastic mirror descent: sample, solve the second stage to a
// scheduled accuracy, assemble the stochastic subgradient, prox step. Also
// the cap schedules and the evaluator for the theoretical gap bound.

#ifndef ISMD_MIRROR_DESCENT_HPP_
#define ISMD_MIRROR_DESCENT_HPP_

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ismd/error.hpp"
#include "ismd/geometry.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"

namespace ismd {

// Fixed inner tolerance for every iteration; 1e-10 is plain SMD.
struct ExactAccuracy {
  double eps = 1e-10;
};

// eps_t = theta2 / t^2.
struct TheorySchedule {
  double theta2 = 1.0;
};

enum class CapVariant { kIsmd1, kIsmd2, kIsmd3, kIsmd4 };

inline std::string ToString(CapVariant v) {
  switch (v) {
    case CapVariant::kIsmd1: return "ismd1";
    case CapVariant::kIsmd2: return "ismd2";
    case CapVariant::kIsmd3: return "ismd3";
    case CapVariant::kIsmd4: return "ismd4";
  }
  return "unknown";
}

// Inner iteration caps growing with t. The inner solver still stops early
// at target_eps; an empty i_max means no cap at all.
struct CapSchedule {
  CapVariant variant = CapVariant::kIsmd3;
  std::optional<int> i_max = 15;
  double target_eps = 1e-10;
};

using AccuracyMode = std::variant<ExactAccuracy, TheorySchedule, CapSchedule>;

struct IsmdConfig {
  int N = 1000;
  double theta1 = 1.0;  // gamma = theta1 / sqrt(N)
  AccuracyMode accuracy = ExactAccuracy{};
  std::uint64_t seed = 0;
  bool keep_iterates = false;
};

struct IterationRecord {
  int t = 0;
  double eps_certified = 0.0;
  double value = 0.0;      // f1(x^t) + f2(x2^t, x^t, xi^t)
  double f_running = 0.0;  // weighted mean of value over 1..t
  int solver_iterations = 0;
  std::optional<int> cap;
};

struct IsmdRun {
  IsmdConfig config;
  double step = 0.0;
  std::vector<IterationRecord> trace;
  std::vector<Vector> iterates;  // x^t, only with keep_iterates
  std::vector<Vector> samples;   // xi^t, only with keep_iterates
  Vector x1_avg;
  double f_hat = 0.0;
};

template <class P>
concept StochasticTwoStageProblem =
    requires(const P& p, const Vector& x, RngStream& rng, const Scenario& s,
             const SolveReport& r, double eps, std::optional<int> cap) {
      { p.first_stage_set() } -> std::convertible_to<FirstStageSet>;
      { p.dgf() } -> std::convertible_to<DistanceGenerator>;
      { p.Sample(rng) } -> std::convertible_to<Scenario>;
      { p.SolveStage(x, s, eps, cap) } -> std::convertible_to<SolveReport>;
      { p.FirstStageValue(x) } -> std::convertible_to<double>;
      { p.FirstStageSubgradient(x) } -> std::convertible_to<Vector>;
      { p.RecourseGradient(x, s, r) } -> std::convertible_to<Vector>;
    };

namespace internal {

struct CapTable {
  std::vector<int> upper_pct;  // ranges of t / N end at pct / 100
  std::vector<int> cap_pct;    // cap = ceil(pct I_max / 100)
};

inline const CapTable& CapTableFor(CapVariant v) {
  static const CapTable kIsmd1{{10, 20, 30, 40, 50, 60, 70, 80, 90, 100},
                               {10, 20, 30, 40, 50, 60, 70, 80, 90, 100}};
  static const CapTable kIsmd2{{10, 20, 30, 40, 50, 100},
                               {20, 40, 60, 80, 90, 100}};
  static const CapTable kIsmd3{{2, 4, 6, 8, 10, 100},
                               {50, 60, 70, 80, 90, 100}};
  static const CapTable kIsmd4{{10, 20, 30, 100}, {70, 80, 90, 100}};
  switch (v) {
    case CapVariant::kIsmd1: return kIsmd1;
    case CapVariant::kIsmd2: return kIsmd2;
    case CapVariant::kIsmd3: return kIsmd3;
    case CapVariant::kIsmd4: return kIsmd4;
  }
  return kIsmd4;
}

inline long long CeilPercent(long long pct, long long value) {
  return (pct * value + 99) / 100;
}

}  // namespace internal

// Inner iteration cap at outer iteration t (1-based) of N.
inline int CapForIteration(CapVariant variant, int t, int n_iterations,
                           int i_max) {
  internal::Require(n_iterations >= 1 && t >= 1 && t <= n_iterations,
                    "CapForIteration: t must lie in [1, N]");
  internal::Require(i_max >= 1, "CapForIteration: I_max must be >= 1");
  const internal::CapTable& table = internal::CapTableFor(variant);
  for (std::size_t k = 0; k < table.upper_pct.size(); ++k) {
    // t / N in (lower, upper] compared exactly in integers.
    if (100LL * t <= static_cast<long long>(table.upper_pct[k]) * n_iterations) {
      return static_cast<int>(internal::CeilPercent(table.cap_pct[k], i_max));
    }
  }
  return i_max;
}

// Tolerance and cap handed to the inner solver at iteration t.
inline std::pair<double, std::optional<int>> InnerAccuracy(
    const AccuracyMode& mode, int t, int n_iterations) {
  if (const auto* exact = std::get_if<ExactAccuracy>(&mode)) {
    return {exact->eps, std::nullopt};
  }
  if (const auto* theory = std::get_if<TheorySchedule>(&mode)) {
    return {theory->theta2 / (static_cast<double>(t) * t), std::nullopt};
  }
  const auto& cap = std::get<CapSchedule>(mode);
  if (!cap.i_max) return {cap.target_eps, std::nullopt};
  return {cap.target_eps,
          CapForIteration(cap.variant, t, n_iterations, *cap.i_max)};
}

inline void ValidateConfig(const IsmdConfig& config) {
  internal::Require(config.N >= 2, "IsmdConfig: N must be >= 2");
  internal::Require(std::isfinite(config.theta1) && config.theta1 > 0.0,
                    "IsmdConfig: theta1 must be positive");
  if (const auto* exact = std::get_if<ExactAccuracy>(&config.accuracy)) {
    internal::Require(exact->eps > 0.0, "IsmdConfig: eps must be positive");
  } else if (const auto* theory =
                 std::get_if<TheorySchedule>(&config.accuracy)) {
    internal::Require(theory->theta2 > 0.0,
                      "IsmdConfig: theta2 must be positive");
  } else {
    const auto& cap = std::get<CapSchedule>(config.accuracy);
    internal::Require(!cap.i_max || *cap.i_max >= 1,
                      "IsmdConfig: I_max must be >= 1");
    internal::Require(cap.target_eps > 0.0,
                      "IsmdConfig: target eps must be positive");
  }
}

// One run with constant step theta1 / sqrt(N), started at the omega-center.
// Every iteration t = 1..N samples and solves; the prox step is skipped after
// the last one. Entropy iterates are carried in log coordinates.
template <StochasticTwoStageProblem Problem>
IsmdRun RunIsmd(const Problem& problem, const IsmdConfig& config) {
  ValidateConfig(config);
  const FirstStageSet set = problem.first_stage_set();
  const DistanceGenerator dgf = problem.dgf();
  const bool entropy = dgf == DistanceGenerator::kEntropy;
  RngStream rng(config.seed);

  IsmdRun run;
  run.config = config;
  run.step = config.theta1 / std::sqrt(static_cast<double>(config.N));
  run.trace.reserve(config.N);

  Vector x = set.OmegaCenter(dgf);
  Vector log_x;
  if (entropy) log_x = x.array().log().matrix();
  Vector x_sum = Vector::Zero(x.size());
  double value_sum = 0.0;

  for (int t = 1; t <= config.N; ++t) {
    const Scenario scen = problem.Sample(rng);
    const auto [eps, cap] = InnerAccuracy(config.accuracy, t, config.N);
    const SolveReport report = problem.SolveStage(x, scen, eps, cap);
    const double value = problem.FirstStageValue(x) + report.primal_value;
    const Vector g =
        problem.FirstStageSubgradient(x) + problem.RecourseGradient(x, scen, report);
    if (!g.allFinite() || !std::isfinite(value)) {
      throw NumericalFailure("RunIsmd: non-finite stochastic gradient or value "
                             "at iteration " + std::to_string(t));
    }
    if (config.keep_iterates) {
      run.iterates.push_back(x);
      run.samples.push_back(scen.xi());
    }
    x_sum += x;
    value_sum += value;
    run.trace.push_back({t, report.eps_certified, value, value_sum / t,
                         report.iterations, cap});
    if (t == config.N) break;
    const Vector zeta = run.step * g;
    if (entropy) {
      log_x = internal::EntropyProxLog(log_x, zeta);
      x = log_x.array().exp().matrix();
    } else {
      x = ProxStep(dgf, set, x, zeta);
    }
  }
  run.x1_avg = x_sum / static_cast<double>(config.N);
  run.f_hat = value_sum / static_cast<double>(config.N);
  return run;
}

// Reruns for each N of the grid; returns (N, f_hat).
template <StochasticTwoStageProblem Problem>
std::vector<std::pair<int, double>> SweepIsmd(const Problem& problem,
                                              IsmdConfig config,
                                              std::span<const int> n_grid) {
  std::vector<std::pair<int, double>> out;
  out.reserve(n_grid.size());
  for (int n : n_grid) {
    config.N = n;
    out.emplace_back(n, RunIsmd(problem, config).f_hat);
  }
  return out;
}

struct RateBoundInputs {
  double theta1 = 1.0;
  double theta2 = 0.0;
  double d_omega = 1.0;
  double mu_omega = 1.0;
  double u_bar = 1.0;
  double m_star = 1.0;
};

// (2 theta2 + U sqrt(theta2)) / N + U sqrt(theta2) ln N / N
//   + (D^2 / theta1 + theta1 M*^2 / mu) / (2 sqrt N).
inline double RateBound(const RateBoundInputs& in, int n_iterations) {
  internal::Require(n_iterations >= 2, "RateBound: N must be >= 2");
  internal::Require(in.theta1 > 0.0 && in.theta2 >= 0.0 && in.d_omega > 0.0 &&
                        in.mu_omega > 0.0 && in.u_bar > 0.0 && in.m_star > 0.0,
                    "RateBound: constants must be positive (theta2 >= 0)");
  const double n = n_iterations;
  const double root_theta2 = std::sqrt(in.theta2);
  return (2.0 * in.theta2 + in.u_bar * root_theta2) / n +
         in.u_bar * root_theta2 * std::log(n) / n +
         (in.d_omega * in.d_omega / in.theta1 +
          in.theta1 * in.m_star * in.m_star / in.mu_omega) /
             (2.0 * std::sqrt(n));
}

// Step scale minimizing the 1/sqrt(N) term of RateBound: D sqrt(mu) / M*.
inline double BalancedTheta1(double d_omega, double mu_omega, double m_star) {
  internal::Require(d_omega > 0.0 && mu_omega > 0.0 && m_star > 0.0,
                    "BalancedTheta1: constants must be positive");
  return d_omega * std::sqrt(mu_omega) / m_star;
}

// ((M1 + M2 U1) sqrt(2 / alpha) + 2 E[G0] / sqrt(alpha_D)) Diam(X2).
inline double UbarConstant(double m1, double m2, double u1, double alpha,
                           double alpha_d, double e_g0, double diam_x2) {
  internal::Require(m1 >= 0.0 && m2 >= 0.0 && u1 >= 0.0 && e_g0 >= 0.0 &&
                        diam_x2 >= 0.0,
                    "UbarConstant: constants must be nonnegative");
  internal::Require(alpha > 0.0, "UbarConstant: alpha must be positive");
  double dual = 0.0;
  if (e_g0 > 0.0) {
    internal::Require(alpha_d > 0.0, "UbarConstant: alpha_D must be positive");
    dual = 2.0 * e_g0 / std::sqrt(alpha_d);
  }
  return ((m1 + m2 * u1) * std::sqrt(2.0 / alpha) + dual) * diam_x2;
}

// (f2_max - f2_min + theta2 + L(f2) r) / min(rho_star, kappa / 2).
inline double U2Constant(double f2_max, double f2_min, double theta2,
                         double lipschitz_f2, double r, double rho_star,
                         double kappa) {
  internal::Require(rho_star > 0.0 && kappa > 0.0,
                    "U2Constant: rho_star and kappa must be positive");
  return (f2_max - f2_min + theta2 + lipschitz_f2 * r) /
         std::min(rho_star, 0.5 * kappa);
}

// sqrt(E[(M3 + M0 + sqrt(2) U2 G0)^2]) from per-scenario samples of
// M0 + sqrt(2) U2 G0.
inline double MStarConstant(double m3, std::span<const double> per_scenario) {
  internal::Require(!per_scenario.empty(), "MStarConstant: no samples");
  double total = 0.0;
  for (double v : per_scenario) total += (m3 + v) * (m3 + v);
  return std::sqrt(total / static_cast<double>(per_scenario.size()));
}

}  // namespace ismd

#endif  // ISMD_MIRROR_DESCENT_HPP_
