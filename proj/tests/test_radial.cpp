// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "yamabe/bubble.hpp"
#include "yamabe/error.hpp"
#include "yamabe/radial_operator.hpp"
#include "yamabe/tridiagonal.hpp"

using namespace yamabe;

TEST(RadialGrid, NodesAndInvariants) {
  const RadialGrid g(20.0, 128);
  EXPECT_EQ(g.size(), 129u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[128], 20.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_THROW(RadialGrid(1.0, 128), Error);
  EXPECT_THROW(RadialGrid(10.0, 32), Error);
}

TEST(RadialQuadrature, GaussianInTwoDimensions) {
  const RadialGrid g(12.0, 2048);
  const auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  EXPECT_NEAR(radial_quadrature(f, 2), std::numbers::pi, 1e-10);
}

TEST(RadialQuadrature, ZeroFieldIsExactlyZero) {
  const RadialGrid g(12.0, 256);
  const RadialField f(g, std::vector<double>(g.size(), 0.0));
  EXPECT_EQ(radial_quadrature(f, 7), 0.0);
}

TEST(RadialQuadrature, NonFiniteSampleRejected) {
  const RadialGrid g(12.0, 256);
  auto f = RadialField::sample(g, [](double) { return 1.0; });
  f.values[5] = std::nan("");
  try {
    (void)radial_quadrature(f, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidField);
  }
}

TEST(RadialQuadrature, BubblePowerStableUnderDoubling) {
  const BubbleFamily b(7);
  auto run = [&](int m) {
    const RadialGrid g(1e4, m);
    return radial_quadrature(RadialField::sample(g, [&](double r) { return b.w0_pow(r, b.p + 1.0); }), 7);
  };
  const double a = run(4096), c = run(8192);
  EXPECT_LT(std::abs(a - c) / std::abs(c), 1e-8);
}

TEST(RadialQuadrature, SecondOrderUnderRefinement) {
  // e^{-r} is not even in r, so the end correction at the origin is O(h²).
  auto err = [](int m) {
    const RadialGrid g(60.0, m, 1.0);
    const auto f = RadialField::sample(g, [](double r) { return std::exp(-r); });
    return std::abs(radial_quadrature(f, 3) - 8.0 * std::numbers::pi);
  };
  EXPECT_GE(observed_order(err(128), err(256)), 1.9);
}

TEST(RadialOperator, ConstantIsHarmonic) {
  const RadialGrid g(20.0, 256);
  const RadialOperator op(0, 7, g);
  const std::vector<double> one(g.size(), 1.0);
  const auto au = op.apply(one);
  for (std::size_t i = op.first(); i <= op.last(); ++i) EXPECT_NEAR(au[i], 0.0, 1e-10);
}

TEST(RadialOperator, UnsupportedModeRejected) {
  const RadialGrid g(20.0, 128);
  const RadialField pot(g, std::vector<double>(g.size(), 0.0));
  try {
    (void)radial_operator_matrix(3, 7, pot);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModeOutOfRange);
  }
}

TEST(RadialOperator, SymmetricFormIsBitSymmetric) {
  const BubbleFamily b(7);
  const RadialGrid g(20.0, 256);
  const auto pot = RadialField::sample(g, [&](double r) { return -b.p * b.w0_pow(r, b.p - 1.0); });
  for (int mode = 0; mode <= 2; ++mode) {
    const auto a = radial_operator_matrix(mode, 7, pot).symmetric_dense();
    EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

namespace {

double kernel_residual(int mode, int m) {
  const BubbleFamily b(7);
  const RadialGrid g(20.0, m);
  const auto pot = RadialField::sample(g, [&](double r) { return -b.p * b.w0_pow(r, b.p - 1.0); });
  const auto op = radial_operator_matrix(mode, 7, pot);
  const auto u = mode == 0 ? RadialField::sample(g, [&](double r) { return b.z0(r); })
                           : RadialField::sample(g, [&](double r) { return b.dw0(r); });
  return max_row_residual(op, u.values, std::vector<double>(g.size(), 0.0));
}

}  // namespace

TEST(RadialOperator, TranslationKernelSecondOrder) {
  const double e1 = kernel_residual(1, 256), e2 = kernel_residual(1, 512), e3 = kernel_residual(1, 1024);
  EXPECT_GE(observed_order(e1, e2), 1.9);
  EXPECT_GE(observed_order(e2, e3), 1.9);
}

TEST(RadialOperator, DilationKernelSecondOrder) {
  const double e1 = kernel_residual(0, 256), e2 = kernel_residual(0, 512), e3 = kernel_residual(0, 1024);
  EXPECT_GE(observed_order(e1, e2), 1.9);
  EXPECT_GE(observed_order(e2, e3), 1.9);
}

TEST(SymEig, DirichletLaplacianOnInterval) {
  const int n = 2000;
  const double h = std::numbers::pi / (n + 1);
  SymTridiagonal t;
  t.diag.assign(n, 2.0 / (h * h));
  t.off.assign(n - 1, -1.0 / (h * h));
  const auto pairs = sym_eig_smallest(t, 3);
  EXPECT_NEAR(pairs[0].value, 1.0, 1e-4);
  EXPECT_NEAR(pairs[1].value, 4.0, 1e-3);
  EXPECT_LE(pairs[0].value, pairs[1].value);
  EXPECT_LE(pairs[1].value, pairs[2].value);
  double nrm = 0.0;
  for (double x : pairs[0].vector) nrm += x * x;
  EXPECT_NEAR(nrm, 1.0, 1e-12);
  const auto tv = t.apply(pairs[0].vector);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(tv[i], pairs[0].value * pairs[0].vector[i], 1e-8);
}

TEST(SymEig, IdentityHasRepeatedEigenvalue) {
  SymTridiagonal t;
  t.diag.assign(6, 1.0);
  t.off.assign(5, 0.0);
  const auto pairs = sym_eig_smallest(t, 4);
  for (const auto& pr : pairs) EXPECT_NEAR(pr.value, 1.0, 1e-14);
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      double d = 0.0;
      for (int i = 0; i < 6; ++i) d += pairs[a].vector[i] * pairs[b].vector[i];
      EXPECT_NEAR(d, 0.0, 1e-12);
    }
  const auto dense = sym_eig_smallest(Eigen::MatrixXd::Identity(5, 5), 5);
  for (const auto& pr : dense) EXPECT_NEAR(pr.value, 1.0, 1e-14);
}

TEST(SymEig, NonSymmetricRejected) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = 0.5;
  try {
    (void)sym_eig_smallest(a, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ContractViolation);
  }
}

TEST(SymEig, DenseAndTridiagonalRoutesAgree) {
  const BubbleFamily b(7);
  const RadialGrid g(20.0, 256);
  const auto pot = RadialField::sample(g, [&](double r) { return -b.p * b.w0_pow(r, b.p - 1.0); });
  const auto op = radial_operator_matrix(0, 7, pot);
  const auto tri = sym_eig_smallest(op.symmetric_form(), 4);
  const auto dense = sym_eig_smallest(op.symmetric_dense(), 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(tri[k].value, dense[k].value, 1e-9 * std::abs(dense[k].value) + 1e-9);
}

TEST(TridiagonalLU, SolvesPivotingSystem) {
  const std::vector<double> lo{3.0, 1.0, -2.0}, d{0.0, 1.0, 4.0, 2.0}, up{1.0, 5.0, 1.0};
  const TridiagonalLU lu(lo, d, up);
  ASSERT_FALSE(lu.singular());
  const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
  std::vector<double> b(4);
  for (int i = 0; i < 4; ++i) {
    b[i] = d[i] * x[i];
    if (i > 0) b[i] += lo[i - 1] * x[i - 1];
    if (i < 3) b[i] += up[i] * x[i + 1];
  }
  const auto y = lu.solve(b);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(y[i], x[i], 1e-13);
}
