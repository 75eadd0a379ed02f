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

#include "ismd/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ismd {
namespace {

constexpr DistanceGenerator kEntropy = DistanceGenerator::kEntropy;
constexpr DistanceGenerator kEuclid = DistanceGenerator::kHalfSquaredEuclidean;

TEST(GeometryTest, EntropyProxKnownPoint) {
  const FirstStageSet set = FirstStageSet::Simplex(2);
  const Vector p = ProxStep(kEntropy, set, Vector::Constant(2, 0.5),
                            Eigen::Vector2d(std::log(2.0), 0.0));
  EXPECT_NEAR(p(0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(p(1), 2.0 / 3.0, 1e-14);
}

TEST(GeometryTest, ProxWithZeroStepIsIdentity) {
  const FirstStageSet simplex = FirstStageSet::Simplex(3);
  const Vector x = Eigen::Vector3d(0.2, 0.3, 0.5);
  EXPECT_LE((ProxStep(kEntropy, simplex, x, Vector::Zero(3)) - x).norm(), 1e-12);
  EXPECT_LE((ProxStep(kEuclid, simplex, x, Vector::Zero(3)) - x).norm(), 1e-12);
  const FirstStageSet ball = FirstStageSet::Ball(Vector::Ones(3), 2.0);
  const Vector y = Eigen::Vector3d(1.5, 0.0, 2.0);
  EXPECT_LE((ProxStep(kEuclid, ball, y, Vector::Zero(3)) - y).norm(), 1e-12);
}

TEST(GeometryTest, BallProxProjectsOntoSphere) {
  const FirstStageSet ball = FirstStageSet::Ball(Vector::Zero(2), 1.0);
  const Vector zeta = Eigen::Vector2d(2.0, 0.0);
  const Vector p = ProxStep(kEuclid, ball, Vector::Zero(2), zeta);
  EXPECT_LE((p + zeta / 2.0).norm(), 1e-15);
}

TEST(GeometryTest, EntropyProxSatisfiesVariationalInequality) {
  RngStream rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 5;
    const FirstStageSet set = FirstStageSet::Simplex(n);
    Vector x = UniformVector(rng, n, 0.05, 1.0);
    x /= x.sum();
    const Vector zeta = UniformVector(rng, n, -2.0, 2.0);
    const Vector p = ProxStep(kEntropy, set, x, zeta);
    const Vector h = zeta + (p.array().log() - x.array().log()).matrix();
    for (int k = 0; k < 20; ++k) {
      Vector y = UniformVector(rng, n, 0.0, 1.0);
      y /= y.sum();
      ASSERT_GE(h.dot(y - p), -1e-8);
    }
  }
}

TEST(GeometryTest, EntropyRequiresSimplexAndPositivePoint) {
  const FirstStageSet ball = FirstStageSet::Ball(Vector::Zero(2), 1.0);
  EXPECT_THROW(ProxStep(kEntropy, ball, Vector::Zero(2), Vector::Zero(2)),
               InvalidInput);
  const FirstStageSet simplex = FirstStageSet::Simplex(2);
  EXPECT_THROW(ProxStep(kEntropy, simplex, Eigen::Vector2d(1.0, 0.0),
                        Vector::Zero(2)),
               InvalidInput);
  EXPECT_THROW(ProxStep(kEuclid, simplex, Vector::Ones(3), Vector::Zero(3)),
               InvalidInput);
}

TEST(GeometryTest, OmegaRadiusKnownValues) {
  EXPECT_NEAR(OmegaRadius(kEntropy, FirstStageSet::Simplex(2)),
              std::sqrt(2.0 * std::log(2.0)), 1e-15);
  EXPECT_EQ(OmegaRadius(kEntropy, FirstStageSet::Simplex(1)), 0.0);
  EXPECT_NEAR(OmegaRadius(kEuclid, FirstStageSet::Ball(Vector::Zero(2), 1.0)),
              1.0, 1e-15);
}

TEST(GeometryTest, OmegaCenterMinimizesOmega) {
  EXPECT_LE((FirstStageSet::Simplex(4).OmegaCenter(kEntropy) -
             Vector::Constant(4, 0.25))
                .norm(),
            1e-15);
  const FirstStageSet far = FirstStageSet::Ball(Vector::Constant(1, 10.0), 1.0);
  EXPECT_NEAR(far.OmegaCenter(kEuclid)(0), 9.0, 1e-15);
  const FirstStageSet near = FirstStageSet::Ball(Vector::Constant(1, 0.5), 1.0);
  EXPECT_EQ(near.OmegaCenter(kEuclid)(0), 0.0);
}

TEST(GeometryTest, BregmanKnownValues) {
  EXPECT_NEAR(Bregman(kEntropy, Vector::Constant(2, 0.5), Eigen::Vector2d(1.0, 0.0)),
              std::log(2.0), 1e-15);
  EXPECT_NEAR(Bregman(kEuclid, Vector::Zero(2), Eigen::Vector2d(3.0, 4.0)), 12.5,
              1e-15);
}

TEST(GeometryTest, BregmanIsNonnegativeAndZeroOnDiagonal) {
  RngStream rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Vector x = UniformVector(rng, 4, 0.01, 1.0);
    x /= x.sum();
    Vector y = UniformVector(rng, 4, 0.0, 1.0);
    y /= y.sum();
    ASSERT_GE(Bregman(kEntropy, x, y), -1e-15);
    ASSERT_NEAR(Bregman(kEntropy, x, x), 0.0, 1e-15);
    // Strong convexity modulus 1 w.r.t. l1.
    ASSERT_GE(Bregman(kEntropy, x, y), 0.5 * std::pow((y - x).lpNorm<1>(), 2) - 1e-12);
  }
}

TEST(GeometryTest, FrankWolfeGapAndDualNorm) {
  const FirstStageSet simplex = FirstStageSet::Simplex(2);
  EXPECT_NEAR(FrankWolfeGap(simplex, Eigen::Vector2d(1.0, 2.0),
                            Eigen::Vector2d(0.0, 1.0)),
              1.0, 1e-15);
  EXPECT_EQ(FrankWolfeGap(simplex, Eigen::Vector2d(1.0, 2.0),
                          Eigen::Vector2d(1.0, 0.0)),
            0.0);
  const FirstStageSet ball = FirstStageSet::Ball(Vector::Zero(2), 1.0);
  EXPECT_NEAR(FrankWolfeGap(ball, Eigen::Vector2d(3.0, 4.0), Vector::Zero(2)), 5.0,
              1e-15);
  EXPECT_EQ(DualNorm(kEntropy, Eigen::Vector2d(-3.0, 2.0)), 3.0);
  EXPECT_NEAR(DualNorm(kEuclid, Eigen::Vector2d(3.0, 4.0)), 5.0, 1e-15);
}

TEST(GeometryTest, SetConstructionValidates) {
  EXPECT_THROW(FirstStageSet::Simplex(0), InvalidInput);
  EXPECT_THROW(FirstStageSet::Ball(Vector::Zero(2), 0.0), InvalidInput);
  EXPECT_THROW(FirstStageSet::Ball(Vector(), 1.0), InvalidInput);
  EXPECT_TRUE(FirstStageSet::Simplex(2).Contains(Eigen::Vector2d(0.5, 0.5)));
  EXPECT_FALSE(FirstStageSet::Simplex(2).Contains(Eigen::Vector2d(0.6, 0.5)));
}

}  // namespace
}  // namespace ismd
