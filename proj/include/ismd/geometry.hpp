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

// First-stage feasible sets, distance-generating functions and the closed
// form prox-mappings used by the mirror-descent iterations.

#ifndef ISMD_GEOMETRY_HPP_
#define ISMD_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ismd/error.hpp"
#include "ismd/numkit.hpp"

namespace ismd {

enum class DistanceGenerator {
  kEntropy,               // sum x_i ln x_i, modulus 1 w.r.t. the l1 norm
  kHalfSquaredEuclidean,  // ||x||^2 / 2, modulus 1 w.r.t. the l2 norm
};

inline std::string ToString(DistanceGenerator dgf) {
  return dgf == DistanceGenerator::kEntropy ? "entropy" : "euclidean";
}

// Either the unit simplex of dimension `dim` or the closed ball
// {x : ||x - center|| <= radius}.
class FirstStageSet {
 public:
  enum class Kind { kSimplex, kBall };

  static FirstStageSet Simplex(int dim) {
    internal::Require(dim >= 1, "FirstStageSet: simplex dimension must be >= 1");
    FirstStageSet set;
    set.kind_ = Kind::kSimplex;
    set.dim_ = dim;
    return set;
  }

  static FirstStageSet Ball(const Vector& center, double radius) {
    internal::Require(center.size() >= 1, "FirstStageSet: empty ball center");
    internal::Require(center.allFinite(), "FirstStageSet: non-finite center");
    internal::Require(std::isfinite(radius) && radius > 0.0,
                      "FirstStageSet: ball radius must be positive");
    FirstStageSet set;
    set.kind_ = Kind::kBall;
    set.dim_ = static_cast<int>(center.size());
    set.center_ = center;
    set.radius_ = radius;
    return set;
  }

  Kind kind() const { return kind_; }
  bool is_simplex() const { return kind_ == Kind::kSimplex; }
  int dim() const { return dim_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

  bool Contains(const Vector& x, double tol = 1e-10) const {
    if (x.size() != dim_ || !x.allFinite()) return false;
    if (is_simplex()) {
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    }
    return (x - center_).norm() <= radius_ + tol;
  }

  // Euclidean diameter.
  double Diameter() const {
    if (is_simplex()) return dim_ == 1 ? 0.0 : std::sqrt(2.0);
    return 2.0 * radius_;
  }

  // Minimizer of the distance-generating function over the set.
  Vector OmegaCenter(DistanceGenerator dgf) const {
    CheckPairing(dgf);
    if (is_simplex()) return Vector::Constant(dim_, 1.0 / dim_);
    if (center_.norm() <= radius_) return Vector::Zero(dim_);
    return center_ - radius_ * center_ / center_.norm();
  }

  void CheckPairing(DistanceGenerator dgf) const {
    if (dgf == DistanceGenerator::kEntropy && !is_simplex()) {
      throw InvalidInput("entropy distance-generating function requires the "
                         "simplex");
    }
  }

 private:
  Kind kind_ = Kind::kSimplex;
  int dim_ = 0;
  Vector center_;
  double radius_ = 0.0;
};

namespace internal {

inline void CheckProxArgs(const FirstStageSet& set, const Vector& x,
                          const Vector& zeta) {
  Require(x.size() == set.dim() && zeta.size() == set.dim(),
          "prox: dimension mismatch");
  Require(x.allFinite() && zeta.allFinite(), "prox: non-finite input");
}

// Entropy prox in log coordinates: z = ln x, returns ln x_+. Keeping the log
// iterate avoids losing information when exp(z) underflows.
inline Vector EntropyProxLog(const Vector& z, const Vector& zeta) {
  const Vector shifted = z - zeta;
  const Vector w = (shifted.array() - shifted.maxCoeff()).matrix();
  const double log_sum = std::log(w.array().exp().sum());
  return (w.array() - log_sum).matrix();
}

}  // namespace internal

// argmin_{y in X} <zeta, y> + V(x, y), with V the Bregman distance of `dgf`.
inline Vector ProxStep(DistanceGenerator dgf, const FirstStageSet& set,
                       const Vector& x, const Vector& zeta) {
  set.CheckPairing(dgf);
  internal::CheckProxArgs(set, x, zeta);
  if (dgf == DistanceGenerator::kEntropy) {
    if (x.minCoeff() <= 0.0) {
      throw InvalidInput("prox: entropy prox needs a strictly positive point");
    }
    return internal::EntropyProxLog(x.array().log().matrix(), zeta)
        .array()
        .exp()
        .matrix();
  }
  const Vector moved = x - zeta;
  if (set.is_simplex()) return ProjectSimplex(moved);
  const Vector offset = moved - set.center();
  const double dist = offset.norm();
  if (dist <= set.radius()) return moved;
  return set.center() + (set.radius() / dist) * offset;
}

// sqrt(2 (max_X omega - min_X omega)).
inline double OmegaRadius(DistanceGenerator dgf, const FirstStageSet& set) {
  set.CheckPairing(dgf);
  const double n = set.dim();
  if (dgf == DistanceGenerator::kEntropy) return std::sqrt(2.0 * std::log(n));
  if (set.is_simplex()) return std::sqrt(1.0 - 1.0 / n);
  const double c = set.center().norm();
  const double far = c + set.radius();
  const double near = std::max(c - set.radius(), 0.0);
  return std::sqrt(far * far - near * near);
}

// Bregman distance V(x, y) = omega(y) - omega(x) - <omega'(x), y - x>.
inline double Bregman(DistanceGenerator dgf, const Vector& x, const Vector& y) {
  internal::Require(x.size() == y.size() && x.size() >= 1,
                    "Bregman: dimension mismatch");
  internal::Require(x.allFinite() && y.allFinite(), "Bregman: non-finite input");
  if (dgf == DistanceGenerator::kHalfSquaredEuclidean) {
    return 0.5 * (y - x).squaredNorm();
  }
  internal::Require(x.minCoeff() > 0.0 && y.minCoeff() >= 0.0,
                    "Bregman: entropy needs x > 0 and y >= 0");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (y(i) > 0.0) total += y(i) * std::log(y(i) / x(i));
    total += x(i) - y(i);
  }
  return total;
}

// max over the set of <grad, x - y>: bounds F(x) - min F for convex F.
inline double FrankWolfeGap(const FirstStageSet& set, const Vector& grad,
                            const Vector& x) {
  internal::Require(grad.size() == set.dim() && x.size() == set.dim(),
                    "FrankWolfeGap: dimension mismatch");
  if (set.is_simplex()) {
    const double low = grad.minCoeff();
    return std::max(0.0, x.dot((grad.array() - low).matrix()));
  }
  return std::max(0.0,
                  grad.dot(x - set.center()) + set.radius() * grad.norm());
}

// Dual norm of a gradient: l_inf for entropy, l2 otherwise.
inline double DualNorm(DistanceGenerator dgf, const Vector& g) {
  return dgf == DistanceGenerator::kEntropy ? g.lpNorm<Eigen::Infinity>()
                                            : g.norm();
}

}  // namespace ismd

#endif  // ISMD_GEOMETRY_HPP_
