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

// Dense linear algebra, simplex projection and a portable random stream.
// Eigen does the factorizations; everything above it works on these types.

#ifndef ISMD_NUMKIT_HPP_
#define ISMD_NUMKIT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ismd/error.hpp"

namespace ismd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool AllFinite(const Vector& v) { return v.allFinite(); }
inline bool AllFinite(const Matrix& m) { return m.allFinite(); }

// Square matrix that is symmetric by construction: the input is replaced by
// (A + A^T) / 2, so downstream eigen solvers see exact symmetry.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a) {
    internal::Require(a.rows() == a.cols() && a.rows() >= 1,
                      "SymMatrix: matrix must be square with order >= 1");
    internal::Require(a.allFinite(), "SymMatrix: non-finite entry");
    data_ = 0.5 * (a + a.transpose());
  }

  static SymMatrix Identity(int order) {
    return SymMatrix(Matrix::Identity(order, order));
  }

  int order() const { return static_cast<int>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  double operator()(int i, int j) const { return data_(i, j); }

 private:
  Matrix data_;
};

struct EigenExtremes {
  double min;
  double max;
};

inline Vector EigenValues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("EigenValues: eigen solver did not converge");
  }
  return solver.eigenvalues();
}

inline EigenExtremes EigenExtremesOf(const SymMatrix& m) {
  const Vector values = EigenValues(m);
  return {values(0), values(values.size() - 1)};
}

// Solves M y = rhs for symmetric positive definite M.
inline Vector SpdSolve(const SymMatrix& m, const Vector& rhs) {
  internal::Require(rhs.size() == m.order(), "SpdSolve: dimension mismatch");
  internal::Require(rhs.allFinite(), "SpdSolve: non-finite right-hand side");
  Eigen::LLT<Matrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("SpdSolve: matrix is not positive definite");
  }
  return llt.solve(rhs);
}

// Largest singular value.
inline double SpectralNorm(const Matrix& a) {
  internal::Require(a.size() > 0, "SpectralNorm: empty matrix");
  internal::Require(a.allFinite(), "SpectralNorm: non-finite entry");
  const Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose())
                                           : Matrix(a.transpose() * a);
  const double top = EigenExtremesOf(SymMatrix(gram)).max;
  return std::sqrt(std::max(top, 0.0));
}

// Euclidean projection onto {x >= 0, sum x = 1} by sort-and-threshold.
inline Vector ProjectSimplex(const Vector& v) {
  internal::Require(v.size() >= 1, "ProjectSimplex: empty vector");
  internal::Require(v.allFinite(), "ProjectSimplex: non-finite entry");
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) tau = candidate;
  }
  Vector out = (v.array() - tau).max(0.0).matrix();
  if (out.sum() == 0.0) {
    // Only reachable through cancellation at extreme magnitudes.
    Eigen::Index top = 0;
    v.maxCoeff(&top);
    out(top) = 1.0;
    return out;
  }
  // One correction pass on the support keeps the sum at 1 to rounding.
  const double excess = out.sum() - 1.0;
  if (excess != 0.0) {
    Eigen::Index support = 0;
    for (Eigen::Index i = 0; i < n; ++i) support += out(i) > 0.0 ? 1 : 0;
    const double shift = excess / static_cast<double>(support);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out(i) > 0.0) out(i) = std::max(out(i) - shift, 0.0);
    }
  }
  return out;
}

// Counter-based SplitMix64 stream. Draws depend only on (seed, counter), so
// sequences are reproducible across platforms and independent of the
// standard library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(Mix(seed)) {}

  std::uint64_t NextU64() {
    ++counter_;
    return Mix(key_ + counter_ * kGolden);
  }

  // Uniform on the open interval (0, 1).
  double Uniform() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal by Box-Muller; one draw per pair of uniforms.
  double Normal() {
    const double u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent child stream; the parent is not advanced.
  RngStream Split(std::uint64_t stream) const {
    RngStream child(0);
    child.key_ = Mix(key_ ^ Mix(stream + kGolden));
    return child;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

inline Vector GaussianVector(RngStream& rng, const Vector& means,
                             const Vector& stds) {
  internal::Require(means.size() == stds.size(),
                    "GaussianVector: means and stds differ in length");
  internal::Require(means.allFinite() && stds.allFinite(),
                    "GaussianVector: non-finite parameter");
  internal::Require((stds.array() > 0.0).all(),
                    "GaussianVector: standard deviations must be positive");
  Vector out(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    out(i) = means(i) + stds(i) * rng.Normal();
  }
  return out;
}

inline Vector UniformVector(RngStream& rng, int size, double lo, double hi) {
  Vector out(size);
  for (int i = 0; i < size; ++i) out(i) = rng.Uniform(lo, hi);
  return out;
}

}  // namespace ismd

#endif  // ISMD_NUMKIT_HPP_
