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

// Command-line front end. Exit codes: 0 success, 2 validation error
// (including unknown flags), 1 runtime failure.

#ifndef ISMD_CLI_HPP_
#define ISMD_CLI_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ismd/baselines.hpp"
#include "ismd/cuts.hpp"
#include "ismd/error.hpp"
#include "ismd/experiments.hpp"
#include "ismd/mirror_descent.hpp"
#include "ismd/strong_concavity.hpp"

namespace ismd {
namespace internal {

// "1..10" or "1,4,9".
inline std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long long lo = ParseInteger("seeds", Trim(text.substr(0, dots)));
    const long long hi = ParseInteger("seeds", Trim(text.substr(dots + 2)));
    Require(lo >= 0 && lo <= hi && hi - lo < 100000,
            "seeds: range must be lo..hi with 0 <= lo <= hi");
    for (long long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long s = ParseInteger("seeds", Trim(item));
    Require(s >= 0, "seeds: must be >= 0");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  Require(!out.empty(), "seeds: empty list");
  return out;
}

template <class T, class Parse>
std::vector<T> ParseList(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(Trim(item)));
  Require(!out.empty(), "empty list '" + text + "'");
  return out;
}

// Writes to `path`, or to stdout when path is empty.
inline void Emit(const std::string& path,
                 const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw NumericalFailure("cannot open output file '" + path + "'");
  write(file);
  if (!file) throw NumericalFailure("failed writing '" + path + "'");
}

struct CommonOptions {
  std::string problem = "simplex";
  int n = 5;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> instance_seed;
  std::string config;
  std::string out;
};

inline void AddInstanceOptions(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--problem", o.problem, "simplex or ball");
  sub->add_option("--n", o.n, "first- and second-stage dimension");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--instance-seed", o.instance_seed,
                  "seed for instance data (defaults to --seed)");
  sub->add_option("--config", o.config, "key = value instance file");
}

inline InstanceSpec SpecFrom(const CommonOptions& o, const CLI::App* sub) {
  InstanceSpec spec;
  if (!o.config.empty()) {
    std::ifstream file(o.config);
    Require(static_cast<bool>(file), "cannot read config '" + o.config + "'");
    spec = ParseInstanceConfig(file, spec);
  }
  if (sub->count("--problem") > 0 || o.config.empty()) {
    spec.problem = ParseProblemKind(o.problem);
  }
  if (sub->count("--n") > 0 || o.config.empty()) spec.n = o.n;
  if (o.instance_seed) {
    spec.seed = *o.instance_seed;
  } else if (sub->count("--seed") > 0 || o.config.empty()) {
    spec.seed = o.seed;
  }
  ValidateSpec(spec);
  return spec;
}

inline nlohmann::json ToJson(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace internal

inline int CliMain(int argc, const char* const* argv) {
  CLI::App app{"Inexact stochastic mirror descent for two-stage programs"};
  app.require_subcommand(1);
  internal::CommonOptions common;

  // generate
  CLI::App* generate = app.add_subcommand("generate", "write an instance as JSON");
  internal::AddInstanceOptions(generate, common);
  generate->add_option("--out", common.out, "output path (default stdout)");

  // solve
  CLI::App* solve = app.add_subcommand("solve", "run one method, write its trace");
  internal::AddInstanceOptions(solve, common);
  std::string method = "smd";
  int big_n = 1000;
  double eps = 1e-10;
  double theta1 = 1.0;
  double theta2 = 1.0;
  std::optional<int> i_max;
  double saa_tol = 1e-6;
  double lshaped_gap = 0.05;
  solve->add_option("--method", method, "smd|ismd1..4|theory|saa|lshaped");
  solve->add_option("--N", big_n, "iterations (SMD/ISMD) or sample size (SAA)");
  solve->add_option("--eps", eps, "inner tolerance for smd and cap schedules");
  solve->add_option("--theta1", theta1, "step scale, gamma = theta1 / sqrt(N)");
  solve->add_option("--theta2", theta2, "theory schedule eps_t = theta2 / t^2");
  solve->add_option("--imax", i_max, "I_max of the cap schedules");
  solve->add_option("--saa-tol", saa_tol, "SAA Frank-Wolfe gap tolerance");
  solve->add_option("--gap", lshaped_gap, "L-shaped relative gap");
  solve->add_option("--out", common.out, "trace CSV path (default stdout)");

  // cuts-demo
  CLI::App* cuts = app.add_subcommand("cuts-demo", "build every applicable cut");
  internal::AddInstanceOptions(cuts, common);
  double cut_eps = 1e-3;
  int cut_samples = 200;
  cuts->add_option("--eps", cut_eps, "second-stage tolerance");
  cuts->add_option("--samples", cut_samples, "validation points");
  cuts->add_option("--out", common.out, "CSV path (default stdout)");

  // alpha-d
  CLI::App* alpha = app.add_subcommand("alpha-d", "dual strong-concavity constant");
  internal::AddInstanceOptions(alpha, common);
  int alpha_checks = 200;
  alpha->add_option("--checks", alpha_checks, "verifier checks per test");
  alpha->add_option("--out", common.out, "output path (default stdout)");

  // bound
  CLI::App* bound = app.add_subcommand("bound", "evaluate the rate bound");
  RateBoundInputs rate;
  int bound_n = 1000;
  bound->add_option("--theta1", rate.theta1);
  bound->add_option("--theta2", rate.theta2);
  bound->add_option("--d-omega", rate.d_omega);
  bound->add_option("--mu-omega", rate.mu_omega);
  bound->add_option("--ubar", rate.u_bar);
  bound->add_option("--mstar", rate.m_star);
  bound->add_option("--N", bound_n);

  // table1
  CLI::App* table1 = app.add_subcommand("table1", "eta comparison on S = AA^T + lambda I");
  std::string t1_ns = "10";
  std::string t1_lambdas = "1,100,10000";
  std::string t1_eps = "1e-2,1e-4,1e-6";
  std::string t1_seeds = "1";
  int t1_anchors = 50;
  table1->add_option("--ns", t1_ns, "comma-separated n values");
  table1->add_option("--lambdas", t1_lambdas, "comma-separated lambda values");
  table1->add_option("--eps-levels", t1_eps, "comma-separated tolerances");
  table1->add_option("--seeds", t1_seeds, "lo..hi or comma list");
  table1->add_option("--anchors", t1_anchors, "random anchors per cell");
  table1->add_option("--out", common.out, "CSV path (default stdout)");

  // compare
  CLI::App* compare = app.add_subcommand("compare", "run several methods and seeds");
  internal::AddInstanceOptions(compare, common);
  std::string methods = "smd,ismd3";
  std::string seeds = "1..10";
  compare->add_option("--methods", methods, "comma-separated methods");
  compare->add_option("--seeds", seeds, "lo..hi or comma list");
  compare->add_option("--N", big_n);
  compare->add_option("--eps", eps);
  compare->add_option("--theta1", theta1);
  compare->add_option("--theta2", theta2);
  compare->add_option("--imax", i_max);
  compare->add_option("--saa-tol", saa_tol);
  compare->add_option("--gap", lshaped_gap);
  compare->add_option("--out", common.out,
                      "output prefix; writes <prefix>_trace.csv, "
                      "<prefix>_summary.csv and L-shaped bounds files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    auto manifest_from = [&](CLI::App* sub) {
      RunManifest m;
      m.instance = internal::SpecFrom(common, sub);
      m.N = big_n;
      m.eps = eps;
      m.theta1 = theta1;
      m.theta2 = theta2;
      m.i_max = i_max;
      m.saa_tolerance = saa_tol;
      m.lshaped_gap = lshaped_gap;
      return m;
    };

    if (generate->parsed()) {
      const InstanceSpec spec = internal::SpecFrom(common, generate);
      const TwoStageInstance inst = GenerateInstance(spec);
      nlohmann::json j;
      j["problem"] = ToString(spec.problem);
      j["n"] = spec.n;
      j["seed"] = spec.seed;
      j["lambda_reg"] = spec.lambda_reg;
      j["c"] = internal::ToJson(inst.cost());
      j["xi_mean"] = internal::ToJson(inst.xi_mean());
      j["xi_std"] = internal::ToJson(inst.xi_std());
      if (spec.problem == ProblemKind::kBall) {
        const auto& ball = std::get<BallStage>(inst.stage());
        j["R"] = ball.R;
        j["x0"] = internal::ToJson(ball.x0);
        j["y0"] = internal::ToJson(ball.y0);
      }
      internal::Emit(common.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      return 0;
    }

    if (solve->parsed()) {
      RunManifest m = manifest_from(solve);
      m.methods = {ParseMethod(method)};
      m.seeds = {common.seed};
      const ComparisonOutput result = RunMethodComparison(m);
      internal::Emit(common.out,
                     [&](std::ostream& os) { WriteTraceCsv(os, result.trace); });
      if (!common.out.empty()) {
        std::cout << "method=" << method
                  << " final_value=" << FormatNumber(result.summary[0].final_value)
                  << " rows=" << result.trace.size() << '\n';
      }
      return 0;
    }

    if (cuts->parsed()) {
      const InstanceSpec spec = internal::SpecFrom(common, cuts);
      const TwoStageInstance inst = GenerateInstance(spec);
      RngStream rng(common.seed);
      const Scenario scen = inst.Sample(rng);
      const Vector anchor = SampleFirstStage(inst.first_stage_set(), rng);
      const SolveReport report = inst.SolveStage(anchor, scen, cut_eps, {});
      const CutProblemData data = MakeCutData(inst.stage(), scen, anchor);
      std::vector<std::pair<std::string, std::function<Cut()>>> makers = {
          {"fixed_l1", [&] { return CutFixedL1(data, report); }},
          {"fixed_strong", [&] { return CutFixedStrong(data, report); }},
          {"variable_l2", [&] { return CutVariableL2(data, report); }},
          {"variable_strong", [&] { return CutVariableStrong(data, report); }},
      };
      for (char c = 'a'; c <= 'i'; ++c) {
        makers.push_back({std::string("corollary_") + c,
                          [&data, &report, c] { return CutCorollary(c, data, report); }});
      }
      std::ostringstream os;
      os << "variant,eps,eta,anchor_gap_bound,anchor_gap,max_violation\n";
      for (const auto& [name, make] : makers) {
        Cut cut;
        try {
          cut = make();
        } catch (const StructureMismatch&) {
          continue;
        }
        RngStream vrng = rng.Split(1);
        const CutValidation v = ValidateCut(cut, data, cut_samples, vrng);
        os << name << ',' << FormatNumber(report.eps_certified) << ','
           << FormatNumber(cut.eta) << ',' << FormatNumber(cut.anchor_gap_bound)
           << ',' << FormatNumber(v.anchor_gap) << ','
           << FormatNumber(v.max_violation) << '\n';
      }
      internal::Emit(common.out, [&](std::ostream& out) { out << os.str(); });
      return 0;
    }

    if (alpha->parsed()) {
      InstanceSpec spec = internal::SpecFrom(common, alpha);
      internal::Require(spec.problem == ProblemKind::kBall,
                        "alpha-d: requires --problem ball");
      const TwoStageInstance inst = GenerateInstance(spec);
      RngStream rng(common.seed);
      const Scenario scen = inst.Sample(rng);
      const Vector anchor = SampleFirstStage(inst.first_stage_set(), rng);
      const auto& ball = std::get<BallStage>(inst.stage());
      const ConcavityCertificate cert = BallStageConcavity(ball, anchor, scen);
      RngStream vrng = rng.Split(1);
      const ConcavityCheck check = VerifyConcavity(
          [&](double mu) { return DualFunctionValue(ball, anchor, scen, mu); },
          0.0, cert.mu_bar, cert.alpha_d, alpha_checks, vrng);
      internal::Emit(common.out, [&](std::ostream& os) {
        os << "alpha_D=" << FormatNumber(cert.alpha_d) << '\n'
           << "mu_bar=" << FormatNumber(cert.mu_bar) << '\n'
           << "verify=" << (check.passed ? "pass" : "fail") << '\n';
      });
      return check.passed ? 0 : 1;
    }

    if (bound->parsed()) {
      std::cout << FormatNumber(RateBound(rate, bound_n)) << '\n';
      return 0;
    }

    if (table1->parsed()) {
      const auto ns = internal::ParseList<int>(t1_ns, [](const std::string& s) {
        return static_cast<int>(internal::ParseInteger("ns", s));
      });
      const auto lambdas = internal::ParseList<double>(
          t1_lambdas, [](const std::string& s) { return internal::ParseDouble("lambdas", s); });
      const auto levels = internal::ParseList<double>(
          t1_eps, [](const std::string& s) { return internal::ParseDouble("eps-levels", s); });
      internal::Require(t1_anchors >= 1, "table1: anchors must be >= 1");
      const auto rows = RunTable1Analog(ns, lambdas, levels,
                                        internal::ParseSeedList(t1_seeds), t1_anchors);
      internal::Emit(common.out, [&](std::ostream& os) { WriteTable1Csv(os, rows); });
      return 0;
    }

    if (compare->parsed()) {
      RunManifest m = manifest_from(compare);
      m.methods = internal::ParseList<Method>(methods, ParseMethod);
      m.seeds = internal::ParseSeedList(seeds);
      const ComparisonOutput result = RunMethodComparison(m);
      if (common.out.empty()) {
        WriteSummaryCsv(std::cout, result.summary);
        return 0;
      }
      internal::Emit(common.out + "_trace.csv",
                     [&](std::ostream& os) { WriteTraceCsv(os, result.trace); });
      internal::Emit(common.out + "_summary.csv",
                     [&](std::ostream& os) { WriteSummaryCsv(os, result.summary); });
      for (const BoundsTrajectory& b : result.bounds) {
        internal::Emit(common.out + "_lshaped_seed" + std::to_string(b.seed) +
                           "_bounds.csv",
                       [&](std::ostream& os) { WriteBoundsCsv(os, b.rows); });
      }
      return 0;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ismd

#endif  // ISMD_CLI_HPP_
