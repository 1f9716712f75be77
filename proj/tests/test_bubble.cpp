// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "yamabe/bubble.hpp"
#include "yamabe/error.hpp"
#include "yamabe/radial_operator.hpp"

using namespace yamabe;

TEST(Bubble, ExponentsAndNormalization) {
  const BubbleFamily b(7);
  EXPECT_DOUBLE_EQ(b.p * (7 - 2), 9.0);
  EXPECT_DOUBLE_EQ(b.gamma, 2.5);
  // 35^{5/4}
  EXPECT_NEAR(b.alpha, std::pow(35.0, 1.25), 1e-12 * b.alpha);
  EXPECT_NEAR(b.alpha, 85.13, 0.01);
}

TEST(Bubble, EvalAtCenterAndUnitDistance) {
  const std::vector<double> y(7, 0.0);
  std::vector<double> x(7, 0.0);
  EXPECT_NEAR(eval_bubble(1.0, y, x, 7), std::pow(35.0L, 1.25L), 1e-12);
  x[2] = 1.0;
  EXPECT_NEAR(eval_bubble(1.0, y, x, 7), std::pow(35.0, 1.25) * std::pow(2.0, -2.5), 1e-12);
}

TEST(Bubble, NonPositiveScaleIsDomainError) {
  const std::vector<double> y(7, 0.0);
  try {
    (void)eval_bubble(0.0, y, y, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Bubble, DilationIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), d(0.1, 3.0);
  const int n = 7;
  for (int t = 0; t < 100; ++t) {
    const double delta = d(rng);
    std::vector<double> y(n), x(n), z(n);
    for (int i = 0; i < n; ++i) {
      y[i] = u(rng);
      x[i] = u(rng);
      z[i] = (x[i] - y[i]) / delta;
    }
    const std::vector<double> o(n, 0.0);
    const double lhs = eval_bubble(delta, y, x, n);
    const double rhs = std::pow(delta, -0.5 * (n - 2)) * eval_bubble(1.0, o, z, n);
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::abs(rhs));
  }
}

TEST(Bubble, SampleW0) {
  const RadialGrid g(30.0, 256);
  const auto w = sample_w0(g, 7);
  EXPECT_EQ(w[0], BubbleFamily(7).alpha);
  for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LT(w[i], w[i - 1]);
}

TEST(Bubble, KernelValuesAtOrigin) {
  const RadialGrid g(30.0, 256);
  const auto k = sample_kernels(g, 7);
  EXPECT_NEAR(k.Z0[0], 2.5 * BubbleFamily(7).alpha, 1e-12);
  EXPECT_NEAR(k.Z0[0], 212.8, 0.1);
  EXPECT_EQ(k.Z_radial[0], 0.0);
}

TEST(Bubble, LimitEquationResidualSecondOrder) {
  const BubbleFamily b(7);
  auto err = [&](int m) {
    const RadialGrid g(20.0, m);
    const RadialOperator op(0, 7, g);
    const auto w = sample_w0(g, 7);
    const auto f = RadialField::sample(g, [&](double r) { return b.w0_pow(r, b.p); });
    // -Δ w0 = w0^p
    return max_row_residual(op, w.values, f.values);
  };
  const double e1 = err(256), e2 = err(512), e3 = err(1024);
  EXPECT_GE(observed_order(e1, e2), 1.9);
  EXPECT_GE(observed_order(e2, e3), 1.9);
}

TEST(Eigenpair, PositiveNormalizedAndUnique) {
  const RadialGrid g(20.0, 8192);
  const auto e = compute_eigenpair(g, 7);
  EXPECT_GT(e.lambda0, 0.0);
  EXPECT_NEAR(radial_inner(e.Zeig, e.Zeig, 7), 1.0, 1e-10);
  EXPECT_GT(e.Zeig[0], 0.0);
  for (std::size_t i = 0; i + 1 < e.Zeig.size(); ++i) EXPECT_GT(e.Zeig[i], 0.0);
  for (std::size_t k = 1; k < e.leading.size(); ++k) EXPECT_LE(e.leading[k], 1e-8);
}

TEST(Eigenpair, TailDecayMatchesEigenvalue) {
  const RadialGrid g(20.0, 8192);
  const auto e = compute_eigenpair(g, 7);
  const double slope = tail_decay_slope(e.Zeig, 7, 6.0, 14.0);
  EXPECT_NEAR(slope / -std::sqrt(e.lambda0), 1.0, 0.05);
}
