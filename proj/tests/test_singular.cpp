// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "yamabe/error.hpp"
#include "yamabe/singular_pde.hpp"

using namespace yamabe;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> filled(const SubmanifoldModel& m, double v) { return std::vector<double>(m.size(), v); }

std::vector<double> sampled(const SubmanifoldModel& m, double (*f)(double)) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = f(m.coordinate(i, 0));
  return out;
}

double bump_alpha(double y) { return 1.0 + 0.5 * std::cos(y); }

std::vector<double> solve_bump(int n) {
  const auto m = SubmanifoldModel::circle(kTwoPi, n, 7);
  const SingularProblem p(m, sampled(m, bump_alpha), filled(m, 1.0), Singularity::Attractive);
  return solve_attractive(p).u;
}

}  // namespace

TEST(Bracket, ConstantBalance) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  const auto b1 = bracket_constants({m, filled(m, 1.0), filled(m, 4.0), Singularity::Attractive});
  EXPECT_DOUBLE_EQ(b1.lower, 1.0);
  EXPECT_DOUBLE_EQ(b1.upper, 4.0);
  const auto b2 = bracket_constants({m, filled(m, 4.0), filled(m, 1.0), Singularity::Attractive});
  EXPECT_DOUBLE_EQ(b2.lower, 0.25);
  EXPECT_DOUBLE_EQ(b2.upper, 1.0);
}

TEST(Bracket, ContainsNonconstantSolution) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 128, 7);
  const SingularProblem p(m, sampled(m, [](double y) { return 1.5 + 0.5 * std::sin(y); }), filled(m, 1.0),
                          Singularity::Attractive);
  const auto br = bracket_constants(p);
  for (double v : solve_attractive(p).u) {
    EXPECT_GE(v, br.lower);
    EXPECT_LE(v, br.upper);
  }
}

TEST(SingularProblem, RejectsBadCoefficients) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  EXPECT_THROW(SingularProblem(m, filled(m, 1.0), filled(m, 0.0), Singularity::Repulsive), Error);
  EXPECT_THROW(SingularProblem(m, filled(m, -1.0), filled(m, 1.0), Singularity::Attractive), Error);
}

TEST(Attractive, ConstantCaseExact) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  const SingularProblem p(m, filled(m, 1.0), filled(m, 4.0), Singularity::Attractive);
  const auto s = solve_attractive(p);
  EXPECT_LT(s.residual_norm, 1e-12);
  EXPECT_TRUE(s.monotone);
  for (double v : s.u) EXPECT_NEAR(v, 2.0, 1e-12);
  const auto eigs = certify_attractive_nondegeneracy(p, s.u);
  EXPECT_NEAR(eigs.front(), 2.0, 1e-12);
}

TEST(Attractive, RandomConstants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.2, 5.0);
  const auto m = SubmanifoldModel::circle(kTwoPi, 32, 7, LaplacianScheme::Fourier);
  for (int t = 0; t < 5; ++t) {
    const double a = d(rng), b = d(rng);
    const auto s = solve_attractive({m, filled(m, a), filled(m, b), Singularity::Attractive});
    for (double v : s.u) EXPECT_NEAR(v, std::sqrt(b / a), 1e-12);
  }
}

TEST(Attractive, MonotoneAndNondegenerate) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 128, 7);
  const SingularProblem p(m, sampled(m, bump_alpha), filled(m, 1.0), Singularity::Attractive);
  const auto s = solve_attractive(p);
  EXPECT_TRUE(s.monotone);
  EXPECT_GT(s.monotone_steps, 1);
  EXPECT_TRUE(s.nondegenerate);
  EXPECT_GE(s.linearized_eigs.front(), 0.5 - 1e-8);
  EXPECT_NEAR(p.integral_identity(s.u), 0.0, 1e-8);
}

TEST(Attractive, SecondOrderUnderRefinement) {
  const auto u1 = solve_bump(64), u2 = solve_bump(128), u4 = solve_bump(256);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) {
    e1 = std::max(e1, std::abs(u1[i] - u2[2 * i]));
    e2 = std::max(e2, std::abs(u2[2 * i] - u4[4 * i]));
  }
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Attractive, EigenvalueStableUnderRefinement) {
  auto lowest = [](int n) {
    const auto m = SubmanifoldModel::circle(kTwoPi, n, 7);
    const SingularProblem p(m, sampled(m, bump_alpha), filled(m, 1.0), Singularity::Attractive);
    return certify_attractive_nondegeneracy(p, solve_attractive(p).u).front();
  };
  EXPECT_NEAR(lowest(128), lowest(256), 1e-4);
}

TEST(Repulsive, Feasibility) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  EXPECT_TRUE(repulsive_feasibility({m, filled(m, -1.0), filled(m, 1.0), Singularity::Repulsive}).feasible);
  const auto bad = repulsive_feasibility({m, filled(m, 1.0), filled(m, 1.0), Singularity::Repulsive});
  EXPECT_FALSE(bad.feasible);
  EXPECT_EQ(bad.reason, "min alpha >= 0");
  auto mixed = sampled(m, [](double y) { return 0.45 + 0.55 * std::cos(y); });
  EXPECT_TRUE(repulsive_feasibility({m, mixed, filled(m, 1.0), Singularity::Repulsive}).feasible);
}

TEST(Repulsive, InfeasibleSolveRefused) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  EXPECT_THROW((void)solve_repulsive({m, filled(m, 1.0), filled(m, 1.0), Singularity::Repulsive}), Error);
}

TEST(Window, PrintedInequality) {
  const double l = std::numbers::pi / 2.0;
  EXPECT_TRUE(window_check(l, -2.0, 1));
  EXPECT_FALSE(window_check(l, 0.0, 1));
  EXPECT_FALSE(window_check(l, -5.0, 1));
  EXPECT_TRUE(window_check(l, -5.0, 2));
  EXPECT_FALSE(window_check(l, -1.0, 1));
}

TEST(Repulsive, ConstantSolutionAndSpectrum) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7, LaplacianScheme::Fourier);
  const auto s = solve_repulsive({m, filled(m, -1.0), filled(m, 4.0), Singularity::Repulsive});
  for (double v : s.u) EXPECT_NEAR(v, 2.0, 1e-12);
  ASSERT_GE(s.linearized_eigs.size(), 4u);
  EXPECT_NEAR(s.linearized_eigs[0], -2.0, 1e-9);
  EXPECT_NEAR(s.linearized_eigs[1], -1.0, 1e-9);
  EXPECT_NEAR(s.linearized_eigs[2], -1.0, 1e-9);
  EXPECT_NEAR(s.linearized_eigs[3], 2.0, 1e-9);
  EXPECT_TRUE(s.nondegenerate);
  EXPECT_TRUE(spectral_window(m, -1.0));
}

TEST(Repulsive, RecoversChosenConstant) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  const double ustar = 1.7, b = 3.0;
  const SingularProblem p(m, filled(m, -b / (ustar * ustar)), filled(m, b), Singularity::Repulsive);
  const auto s = solve_repulsive(p);
  for (double v : s.u) EXPECT_NEAR(v, ustar, 1e-12);
  EXPECT_NEAR(p.integral_identity(s.u), 0.0, 1e-8);
}

TEST(Repulsive, EngineeredDegeneracyFlagged) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7);
  const double lambda1 = distinct_positive_eigenvalues(m, 1).front();
  const double a = -lambda1 / 2.0;
  const auto s = solve_repulsive({m, filled(m, a), filled(m, 1.0), Singularity::Repulsive});
  EXPECT_FALSE(s.nondegenerate);
  EXPECT_LT(s.min_abs_eig, 1e-8);
  EXPECT_FALSE(spectral_window(m, a));
}

TEST(Repulsive, HomotopyForNonconstantCoefficients) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 128, 7);
  const SingularProblem p(m, sampled(m, [](double y) { return -1.5 + 0.3 * std::cos(y); }), filled(m, 2.0),
                          Singularity::Repulsive);
  const auto s = solve_repulsive(p, 1e-11);
  EXPECT_LT(s.residual_norm, 1e-11);
  for (double v : s.u) EXPECT_GT(v, 0.0);
  EXPECT_NEAR(p.integral_identity(s.u), 0.0, 1e-8);
}

TEST(Repulsive, DegeneracyStableUnderDoubling) {
  auto flag = [](int n, double a) {
    const auto m = SubmanifoldModel::circle(kTwoPi, n, 7, LaplacianScheme::Fourier);
    return solve_repulsive({m, filled(m, a), filled(m, 1.0), Singularity::Repulsive}).nondegenerate;
  };
  EXPECT_EQ(flag(64, -1.0), flag(128, -1.0));
  EXPECT_EQ(flag(64, -0.5), flag(128, -0.5));
  EXPECT_FALSE(flag(64, -0.5));
}
