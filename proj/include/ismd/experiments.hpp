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

// Instance generation, the eta-comparison harness on simplex-stage
// instances, and the method-comparison driver with its CSV outputs.

#ifndef ISMD_EXPERIMENTS_HPP_
#define ISMD_EXPERIMENTS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ismd/baselines.hpp"
#include "ismd/cuts.hpp"
#include "ismd/error.hpp"
#include "ismd/instance.hpp"
#include "ismd/mirror_descent.hpp"
#include "ismd/numkit.hpp"
#include "ismd/second_stage.hpp"

namespace ismd {

struct InstanceSpec {
  ProblemKind problem = ProblemKind::kSimplex;
  int n = 5;
  double lambda_reg = 2.0;
  double c_min = 1.0, c_max = 3.0;
  double mean_min = 5.0, mean_max = 25.0;
  double std_min = 5.0, std_max = 15.0;
  double radius = 5.0;   // R of the ball stage
  double center = 10.0;  // x0 = y0 = center * ones
  std::uint64_t seed = 0;
};

inline void ValidateSpec(const InstanceSpec& spec) {
  internal::Require(spec.n >= 1, "InstanceSpec: n must be >= 1");
  internal::Require(spec.lambda_reg > 0.0, "InstanceSpec: lambda_reg must be > 0");
  internal::Require(spec.c_min <= spec.c_max && spec.mean_min <= spec.mean_max &&
                        spec.std_min <= spec.std_max,
                    "InstanceSpec: ranges must satisfy min <= max");
  internal::Require(spec.std_min > 0.0, "InstanceSpec: std range must be > 0");
}

// c ~ U[c_min, c_max]^n, then means ~ U[mean range]^{2n}, stds ~ U[std
// range]^{2n}, all from one stream seeded by spec.seed.
inline TwoStageInstance GenerateInstance(const InstanceSpec& spec) {
  ValidateSpec(spec);
  RngStream rng(spec.seed);
  const int n = spec.n;
  Vector cost = UniformVector(rng, n, spec.c_min, spec.c_max);
  Vector means = UniformVector(rng, 2 * n, spec.mean_min, spec.mean_max);
  Vector stds = UniformVector(rng, 2 * n, spec.std_min, spec.std_max);
  if (spec.problem == ProblemKind::kSimplex) {
    return TwoStageInstance(ProblemKind::kSimplex, cost, means, stds,
                            spec.lambda_reg, SimplexStage{n, spec.lambda_reg});
  }
  const Vector center = Vector::Constant(n, spec.center);
  return TwoStageInstance(ProblemKind::kBall, cost, means, stds, spec.lambda_reg,
                          BallStage(center, center, spec.radius, spec.lambda_reg));
}

// Block-form scenario S = A A^T + lambda I (A is 2n x 2n with entries
// U[-20, 20]) and c = ones.
inline Scenario GenerateMatrixScenario(int n, double lambda_reg,
                                       RngStream& rng) {
  internal::Require(n >= 1, "GenerateMatrixScenario: n must be >= 1");
  Matrix a(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) a(i, j) = rng.Uniform(-20.0, 20.0);
  }
  Matrix s = a * a.transpose();
  s.diagonal().array() += lambda_reg;
  return Scenario::FromBlocks(SymMatrix(s), Vector::Ones(2 * n));
}

// Root mean square of the dual norm of the stochastic gradient at uniformly
// sampled first-stage points, with oracle second-stage solves.
inline double EstimateMStar(const TwoStageInstance& instance, int samples,
                            std::uint64_t seed) {
  internal::Require(samples >= 1, "EstimateMStar: samples must be >= 1");
  RngStream rng(seed);
  std::vector<double> norms;
  norms.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const Scenario scen = instance.Sample(rng);
    const Vector x = SampleFirstStage(instance.first_stage_set(), rng);
    const SolveReport r = instance.SolveStage(x, scen, kOracleEps, {});
    const Vector g = instance.FirstStageSubgradient(x) +
                     instance.RecourseGradient(x, scen, r);
    norms.push_back(DualNorm(instance.dgf(), g));
  }
  return MStarConstant(0.0, norms);
}

struct Table1Row {
  int n = 0;
  double lambda_reg = 0.0;
  double eps_target = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double mean_eps = 0.0;   // mean certified eps over the anchors
  double mean_eta1 = 0.0;  // fixed-set strong-convexity cut
  double mean_eta2 = 0.0;  // fixed-set l1 cut
};

// For each (n, lambda, seed) one block-form scenario; for each eps level,
// 50 random anchors in the simplex solved to that tolerance.
inline std::vector<Table1Row> RunTable1Analog(
    const std::vector<int>& n_list, const std::vector<double>& lambda_list,
    const std::vector<double>& eps_levels,
    const std::vector<std::uint64_t>& seeds, int anchors = 50) {
  std::vector<Table1Row> rows;
  for (int n : n_list) {
    for (double lambda_reg : lambda_list) {
      for (std::uint64_t seed : seeds) {
        RngStream rng(seed);
        const Scenario scen = GenerateMatrixScenario(n, lambda_reg, rng);
        const SimplexStage stage{n, lambda_reg};
        std::vector<Vector> points;
        for (int k = 0; k < anchors; ++k) {
          points.push_back(SampleFirstStage(FirstStageSet::Simplex(n), rng));
        }
        for (double eps : eps_levels) {
          Table1Row row{n, lambda_reg, eps, seed, scen.s3_lambda_min()};
          for (const Vector& x : points) {
            const SolveReport report = SolveSimplexStage(stage, x, scen, eps);
            const CutProblemData data = MakeCutData(stage, scen, x);
            row.mean_eps += report.eps_certified;
            row.mean_eta1 += CutFixedStrong(data, report).eta;
            row.mean_eta2 += CutFixedL1(data, report).eta;
          }
          row.mean_eps /= anchors;
          row.mean_eta1 /= anchors;
          row.mean_eta2 /= anchors;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

struct EtaTrajectoryPoint {
  int cap = 0;
  double eps = 0.0;
  double eta_strong = 0.0;  // formula-based
  double eta_l = 0.0;       // l1 (simplex) or l2 (ball)
};

// Certified eps and both eta families along the inner solver's iterations,
// obtained by re-solving with caps 0..max_cap.
inline std::vector<EtaTrajectoryPoint> EtaTrajectory(const CutProblemData& data,
                                                     int max_cap) {
  std::vector<EtaTrajectoryPoint> out;
  for (int cap = 0; cap <= max_cap; ++cap) {
    const SolveReport report =
        Solve(data.stage, data.anchor, data.scen, kOracleEps, cap);
    EtaTrajectoryPoint p{cap, report.eps_certified};
    if (std::holds_alternative<SimplexStage>(data.stage)) {
      p.eta_strong = CutFixedStrong(data, report).eta;
      p.eta_l = CutFixedL1(data, report).eta;
    } else {
      p.eta_strong = CutCorollary('e', data, report).eta;
      p.eta_l = CutVariableL2(data, report).eta;
    }
    out.push_back(p);
    if (report.reached_target) break;
  }
  return out;
}

enum class Method { kSmd, kIsmd1, kIsmd2, kIsmd3, kIsmd4, kTheory, kSaa, kLShaped };

inline std::string ToString(Method m) {
  switch (m) {
    case Method::kSmd: return "smd";
    case Method::kIsmd1: return "ismd1";
    case Method::kIsmd2: return "ismd2";
    case Method::kIsmd3: return "ismd3";
    case Method::kIsmd4: return "ismd4";
    case Method::kTheory: return "theory";
    case Method::kSaa: return "saa";
    case Method::kLShaped: return "lshaped";
  }
  return "unknown";
}

inline Method ParseMethod(const std::string& name) {
  for (Method m : {Method::kSmd, Method::kIsmd1, Method::kIsmd2, Method::kIsmd3,
                   Method::kIsmd4, Method::kTheory, Method::kSaa,
                   Method::kLShaped}) {
    if (ToString(m) == name) return m;
  }
  throw InvalidInput("unknown method '" + name +
                     "' (expected smd|ismd1..4|theory|saa|lshaped)");
}

// Paper defaults: 15 for the simplex problem and the n = 200 ball problem,
// 25 for n = 400, 28 for n = 600.
inline int DefaultImax(ProblemKind kind, int n) {
  if (kind == ProblemKind::kBall) {
    if (n >= 600) return 28;
    if (n >= 400) return 25;
  }
  return 15;
}

struct RunManifest {
  InstanceSpec instance;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  int N = 1000;
  double theta1 = 1.0;
  double theta2 = 1.0;       // theory schedule
  double eps = 1e-10;        // smd tolerance and cap-schedule target
  std::optional<int> i_max;  // default per DefaultImax
  double saa_tolerance = 1e-6;
  double lshaped_gap = 0.05;
};

struct TraceRow {
  std::string method;
  std::uint64_t seed = 0;
  int t = 0;
  double f_running = 0.0;
  double eps_certified = 0.0;
  double step = 0.0;
};

struct SummaryRow {
  std::string method;
  std::uint64_t seed = 0;
  double final_value = 0.0;
  double wall_ms = 0.0;
  int N = 0;
};

struct BoundsTrajectory {
  std::uint64_t seed = 0;
  std::vector<LShapedIteration> rows;
};

struct ComparisonOutput {
  std::vector<TraceRow> trace;
  std::vector<SummaryRow> summary;
  std::vector<BoundsTrajectory> bounds;
};

inline IsmdConfig ConfigFor(Method method, const RunManifest& manifest,
                            std::uint64_t seed) {
  IsmdConfig config;
  config.N = manifest.N;
  config.theta1 = manifest.theta1;
  config.seed = seed;
  const int i_max = manifest.i_max.value_or(
      DefaultImax(manifest.instance.problem, manifest.instance.n));
  switch (method) {
    case Method::kSmd: config.accuracy = ExactAccuracy{manifest.eps}; break;
    case Method::kTheory: config.accuracy = TheorySchedule{manifest.theta2}; break;
    case Method::kIsmd1:
      config.accuracy = CapSchedule{CapVariant::kIsmd1, i_max, manifest.eps};
      break;
    case Method::kIsmd2:
      config.accuracy = CapSchedule{CapVariant::kIsmd2, i_max, manifest.eps};
      break;
    case Method::kIsmd3:
      config.accuracy = CapSchedule{CapVariant::kIsmd3, i_max, manifest.eps};
      break;
    case Method::kIsmd4:
      config.accuracy = CapSchedule{CapVariant::kIsmd4, i_max, manifest.eps};
      break;
    default:
      throw InvalidInput("ConfigFor: " + ToString(method) + " is not an SMD method");
  }
  return config;
}

// All methods at one seed share the scenario stream seeded by that seed:
// SAA and L-shaped use its first N draws, SMD/ISMD draw one per iteration.
inline ComparisonOutput RunMethodComparison(const RunManifest& manifest) {
  internal::Require(!manifest.methods.empty(), "compare: no methods");
  internal::Require(!manifest.seeds.empty(), "compare: no seeds");
  const TwoStageInstance instance = GenerateInstance(manifest.instance);
  ComparisonOutput out;
  using Clock = std::chrono::steady_clock;
  for (Method method : manifest.methods) {
    for (std::uint64_t seed : manifest.seeds) {
      const auto start = Clock::now();
      const std::string tag = ToString(method);
      double final_value = 0.0;
      try {
        if (method == Method::kSaa) {
          const SaaResult r =
              SaaSolve(instance, {manifest.N, manifest.saa_tolerance, 5000, seed});
          for (const SaaTracePoint& p : r.trace) {
            out.trace.push_back({tag, seed, p.iteration, p.value, p.certificate,
                                 p.step});
          }
          final_value = r.value;
        } else if (method == Method::kLShaped) {
          const std::vector<Scenario> scenarios =
              DrawScenarios(instance, manifest.N, seed);
          const LShapedResult r =
              LShapedSolve(instance, scenarios, manifest.lshaped_gap);
          for (const LShapedIteration& p : r.history) {
            out.trace.push_back({tag, seed, p.iter, p.upper, p.upper - p.lower, 0.0});
          }
          out.bounds.push_back({seed, r.history});
          final_value = r.upper;
        } else {
          const IsmdRun run = RunIsmd(instance, ConfigFor(method, manifest, seed));
          for (const IterationRecord& rec : run.trace) {
            out.trace.push_back({tag, seed, rec.t, rec.f_running,
                                 rec.eps_certified, run.step});
          }
          final_value = run.f_hat;
        }
      } catch (const InvalidInput& e) {
        throw InvalidInput(tag + ": " + e.what());
      } catch (const Error& e) {
        throw NumericalFailure(tag + ": " + e.what());
      }
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      out.summary.push_back({tag, seed, final_value, ms, manifest.N});
    }
  }
  return out;
}

// Shortest representation that round-trips.
inline std::string FormatNumber(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void WriteTraceCsv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "method,seed,t,f_running,eps_certified,step\n";
  for (const TraceRow& r : rows) {
    os << r.method << ',' << r.seed << ',' << r.t << ',' << FormatNumber(r.f_running)
       << ',' << FormatNumber(r.eps_certified) << ',' << FormatNumber(r.step) << '\n';
  }
}

inline void WriteSummaryCsv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "method,seed,final_value,wall_ms,N\n";
  for (const SummaryRow& r : rows) {
    os << r.method << ',' << r.seed << ',' << FormatNumber(r.final_value) << ','
       << FormatNumber(r.wall_ms) << ',' << r.N << '\n';
  }
}

inline void WriteBoundsCsv(std::ostream& os,
                           const std::vector<LShapedIteration>& rows) {
  os << "iter,lower,upper\n";
  for (const LShapedIteration& r : rows) {
    os << r.iter << ',' << FormatNumber(r.lower) << ',' << FormatNumber(r.upper)
       << '\n';
  }
}

inline void WriteTable1Csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << "n,lambda,eps_target,seed,alpha,mean_eps,mean_eta1,mean_eta2\n";
  for (const Table1Row& r : rows) {
    os << r.n << ',' << FormatNumber(r.lambda_reg) << ','
       << FormatNumber(r.eps_target) << ',' << r.seed << ','
       << FormatNumber(r.alpha) << ',' << FormatNumber(r.mean_eps) << ','
       << FormatNumber(r.mean_eta1) << ',' << FormatNumber(r.mean_eta2) << '\n';
  }
}

namespace internal {

inline std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double ParseDouble(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  Require(used == value.size() && !value.empty(),
          "config: '" + key + "' expects a number, got '" + value + "'");
  return out;
}

inline long long ParseInteger(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  Require(used == value.size() && !value.empty(),
          "config: '" + key + "' expects an integer, got '" + value + "'");
  return out;
}

}  // namespace internal

// Flat "key = value" lines; '#' starts a comment. Keys are the InstanceSpec
// fields: problem, n, lambda_reg, c_min, c_max, mean_min, mean_max, std_min,
// std_max, R, x0 (also sets y0), seed. Unknown keys are rejected.
inline InstanceSpec ParseInstanceConfig(std::istream& is, InstanceSpec spec = {}) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = internal::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    internal::Require(eq != std::string::npos,
                      "config line " + std::to_string(line_no) +
                          ": expected key = value");
    const std::string key = internal::Trim(line.substr(0, eq));
    const std::string value = internal::Trim(line.substr(eq + 1));
    if (key == "problem") spec.problem = ParseProblemKind(value);
    else if (key == "n") spec.n = static_cast<int>(internal::ParseInteger(key, value));
    else if (key == "lambda_reg") spec.lambda_reg = internal::ParseDouble(key, value);
    else if (key == "c_min") spec.c_min = internal::ParseDouble(key, value);
    else if (key == "c_max") spec.c_max = internal::ParseDouble(key, value);
    else if (key == "mean_min") spec.mean_min = internal::ParseDouble(key, value);
    else if (key == "mean_max") spec.mean_max = internal::ParseDouble(key, value);
    else if (key == "std_min") spec.std_min = internal::ParseDouble(key, value);
    else if (key == "std_max") spec.std_max = internal::ParseDouble(key, value);
    else if (key == "R") spec.radius = internal::ParseDouble(key, value);
    else if (key == "x0" || key == "y0") spec.center = internal::ParseDouble(key, value);
    else if (key == "seed") {
      const long long seed = internal::ParseInteger(key, value);
      internal::Require(seed >= 0, "config: seed must be >= 0");
      spec.seed = static_cast<std::uint64_t>(seed);
    } else {
      throw InvalidInput("config line " + std::to_string(line_no) +
                         ": unknown key '" + key + "'");
    }
  }
  ValidateSpec(spec);
  return spec;
}

}  // namespace ismd

#endif  // ISMD_EXPERIMENTS_HPP_
