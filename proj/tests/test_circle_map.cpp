// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toralrig/circle_map.hpp"

using namespace toralrig;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CircleMap sample_map() { return CircleMap(0.1, {{0.03, -0.02}, {0.0, 0.01}}); }

// Reference lift written out directly.
double lift(double y) {
  return y + 0.1 + 0.03 * std::cos(kTwoPi * y) + 0.02 * std::sin(kTwoPi * y) - 0.01 * std::sin(2.0 * kTwoPi * y);
}

}  // namespace

TEST(CircleMap, EvaluatesFourierLift) {
  const CircleMap f = sample_map();
  for (double y = -1.0; y < 2.0; y += 0.0625) EXPECT_NEAR(f(y), lift(y), 1e-14);
}

TEST(CircleMap, DerivativesMatchFiniteDifferences) {
  const CircleMap f = sample_map();
  const double h = 1e-5;
  for (double y = 0.0; y < 1.0; y += 0.1) {
    EXPECT_NEAR(f.derivative(y), (lift(y + h) - lift(y - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(f.second_derivative(y), (f.derivative(y + h) - f.derivative(y - h)) / (2 * h), 1e-6);
  }
}

TEST(CircleMap, InverseRoundTrips) {
  const CircleMap f = sample_map();
  for (double y = 0.0; y < 1.0; y += 0.01) EXPECT_NEAR(f(f.inverse(y)), y, 1e-13);
}

TEST(CircleMap, CoefficientBoundsEncloseSamples) {
  const CircleMap f = sample_map();
  for (double y = 0.0; y < 1.0; y += 0.001) {
    EXPECT_GE(f.derivative(y), f.min_derivative_bound() - 1e-15);
    EXPECT_LE(f.derivative(y), f.max_derivative_bound() + 1e-15);
    EXPECT_LE(std::abs(f.second_derivative(y)), f.second_derivative_bound() + 1e-12);
  }
}

TEST(CircleDiffeo, CompositionAndInverse) {
  CircleDiffeo g(sample_map());
  g.append(CircleMap::rotation(0.25));
  g.append(sample_map(), true);
  const CircleDiffeo inv = g.inverse();
  for (double y = 0.0; y < 1.0; y += 0.05) {
    const double expect = sample_map().inverse(sample_map()(y) + 0.25);
    EXPECT_NEAR(g(y), expect, 1e-13);
    EXPECT_NEAR(inv(g(y)), y, 1e-12);
    EXPECT_NEAR(g.inverse_apply(g(y)), y, 1e-12);
  }
  EXPECT_LT(distance_from_identity(g.then(inv)), 1e-12);
}

TEST(CircleDiffeo, ChainRuleDerivative) {
  CircleDiffeo g(sample_map());
  g.append(sample_map());
  for (double y = 0.0; y < 1.0; y += 0.1) {
    const double inner = sample_map()(y);
    EXPECT_NEAR(g.derivative(y), sample_map().derivative(inner) * sample_map().derivative(y), 1e-13);
  }
}

TEST(CircleDistance, SignedRepresentative) {
  EXPECT_NEAR(circle_difference(0.95, 0.05), -0.1, 1e-15);
  EXPECT_NEAR(circle_difference(0.05, 0.95), 0.1, 1e-15);
  EXPECT_NEAR(distance_from_rotation(CircleDiffeo::rotation(0.3), 1.3), 0.0, 1e-15);
}

TEST(RotationNumber, RigidRotation) {
  const RotationNumber r = rotation_number(CircleDiffeo::rotation(0.3));
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.value, 0.3, 1e-15);
}

TEST(RotationNumber, ConjugationInvariance) {
  CircleDiffeo g(sample_map());
  g.append(CircleMap::rotation(0.3));
  g.append(sample_map(), true);
  const RotationNumber r = rotation_number(g);
  EXPECT_NEAR(r.value, 0.3, std::max(r.error, 1e-9));
}

TEST(RotationNumber, RationalWithPeriodicOrbit) {
  // y -> y + 1/3 + 0.02 sin(6 pi y) maps the zeros of sin(6 pi y) onto each other.
  CircleDiffeo g(CircleMap(1.0 / 3.0, {{0.0, 0.0}, {0.0, 0.0}, {0.0, -0.02}}));
  const RotationNumber r = rotation_number(g);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.q, 3);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-15);
}
