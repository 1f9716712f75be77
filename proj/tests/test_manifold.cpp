// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "yamabe/error.hpp"
#include "yamabe/manifold.hpp"

using namespace yamabe;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(Laplacian, CircleFourierSpectrum) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 7, LaplacianScheme::Fourier);
  const auto ev = laplace_eigenvalues(m, 5);
  const double expect[] = {0, 1, 1, 4, 4};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-8);
}

TEST(Laplacian, CircleStencilSpectrum) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 256, 7);
  const auto ev = laplace_eigenvalues(m, 5);
  const double expect[] = {0, 1, 1, 4, 4};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-3 * std::max(1.0, expect[i]));
  // Stencil spectrum against its own closed form.
  const auto ex = laplace_eigenvalues_exact(m, 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ev[i], ex[i], 1e-9);
  EXPECT_NEAR(ex[1], 1.0, 1e-4);
}

TEST(Laplacian, ConstantsAnnihilated) {
  const auto c = SubmanifoldModel::circle(3.0, 48, 7);
  const auto out = c.apply_laplacian(std::vector<double>(c.size(), 2.5));
  for (double v : out) EXPECT_EQ(v, 0.0);
  const auto t = SubmanifoldModel::torus(kTwoPi, 5.0, 32, 40, 7);
  const auto ot = t.apply_laplacian(std::vector<double>(t.size(), -1.25));
  for (double v : ot) EXPECT_EQ(v, 0.0);
  const auto f = SubmanifoldModel::circle(kTwoPi, 64, 7, LaplacianScheme::Fourier);
  for (double v : f.apply_laplacian(std::vector<double>(f.size(), 1.0))) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Laplacian, TorusProductSpectrum) {
  const auto t = SubmanifoldModel::torus(kTwoPi, kTwoPi, 32, 32, 7, LaplacianScheme::Fourier);
  const auto ev = laplace_eigenvalues(t, 13);
  const double expect[] = {0, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4};
  for (int i = 0; i < 13; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-8);
  const auto ts = SubmanifoldModel::torus(kTwoPi, kTwoPi, 32, 32, 7);
  const auto es = laplace_eigenvalues(ts, 9);
  const auto xs = laplace_eigenvalues_exact(ts, 9);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(es[i], xs[i], 1e-9);
}

TEST(Laplacian, RejectsCoarseGrid) { EXPECT_THROW(SubmanifoldModel::circle(1.0, 16, 7), Error); }

TEST(Minimality, Cases) {
  auto m = SubmanifoldModel::circle(kTwoPi, 32, 7);
  EXPECT_EQ(check_minimality(m), 0.0);
  EXPECT_TRUE(is_minimal(m));
  for (std::size_t n = 0; n < m.size(); ++n) m.curvature.gamma(n, 0, 0, 0) = 0.3;
  EXPECT_DOUBLE_EQ(check_minimality(m), 0.3);
  EXPECT_FALSE(is_minimal(m));
  auto t = SubmanifoldModel::torus(kTwoPi, kTwoPi, 32, 32, 7);
  for (std::size_t n = 0; n < t.size(); ++n)
    for (int i = 0; i < 7; ++i) {
      t.curvature.gamma(n, 0, 0, i) = 0.2 * (i + 1);
      t.curvature.gamma(n, 1, 1, i) = -0.2 * (i + 1);
    }
  EXPECT_EQ(check_minimality(t), 0.0);
}

TEST(Omega, ZeroData) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 32, 7);
  EXPECT_EQ(compute_omega(m, 3), 0.0);
}

TEST(Omega, PureNormalCurvatureIsConformalPotential) {
  // Only normal-block data: Ω reduces to (N-2)/(4(N-1)) · S with S = Σ R_{jiji}.
  const int N = 7;
  auto m = SubmanifoldModel::circle(kTwoPi, 32, N);
  const double c = 0.37;
  for (std::size_t n = 0; n < m.size(); ++n)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int d = 0; d < N; ++d)
          for (int e = 0; e < N; ++e) m.curvature.normal(n, a, b, d, e) = c * ((a == d) * (b == e) - (a == e) * (b == d));
  const double scalar = c * N * (N - 1);
  EXPECT_NEAR(compute_omega(m, 0), (N - 2) / (4.0 * (N - 1)) * scalar, 1e-13);
}

TEST(Omega, ConstantCurvatureContraction) {
  for (int N : {5, 7, 8}) {
    auto t = SubmanifoldModel::torus(kTwoPi, kTwoPi, 32, 32, N);
    const double c = -0.21;
    t.curvature.set_constant_curvature(c);
    t.curvature.validate();
    // Independent contraction: Σ_{ij} R_{jiji} = c N(N-1); Σ_i g̃^{ab} R_{iaib} = c N k.
    const double expect = 3.0 * (N - 2) / (4.0 * (N - 1)) * c * (N * (N - 1) / 3.0 + N * 2.0);
    EXPECT_NEAR(compute_omega(t, 17), expect, 1e-13);
    EXPECT_NEAR(compute_omega(t, 17, -1), -expect, 1e-13);
  }
}

TEST(Omega, LinearInCurvatureQuadraticInGamma) {
  auto m = SubmanifoldModel::circle(kTwoPi, 32, 7);
  m.curvature.set_constant_curvature(0.4);
  for (std::size_t n = 0; n < m.size(); ++n)
    for (int i = 0; i < 7; ++i) m.curvature.gamma(n, 0, 0, i) = 0.05 * i;
  auto doubled_r = m, doubled_g = m, no_g = m;
  for (auto& v : doubled_r.curvature.R_normal) v *= 2;
  for (auto& v : doubled_r.curvature.R_mixed) v *= 2;
  for (auto& v : doubled_g.curvature.Gamma) v *= 2;
  for (auto& v : no_g.curvature.Gamma) v = 0;
  const double base = compute_omega(m, 0), r_part = compute_omega(no_g, 0), g_part = base - r_part;
  EXPECT_NEAR(compute_omega(doubled_r, 0), 2 * r_part + g_part, 1e-12);
  EXPECT_NEAR(compute_omega(doubled_g, 0), r_part + 4 * g_part, 1e-12);
}

TEST(Curvature, AntisymmetryEnforced) {
  auto m = SubmanifoldModel::circle(kTwoPi, 32, 7);
  m.curvature.normal(0, 0, 1, 0, 1) = 1.0;
  EXPECT_THROW(m.curvature.validate(), Error);
  m.curvature.normal(0, 1, 0, 0, 1) = -1.0;
  m.curvature.normal(0, 0, 1, 1, 0) = -1.0;
  m.curvature.normal(0, 1, 0, 1, 0) = 1.0;
  EXPECT_NO_THROW(m.curvature.validate());
}

TEST(Jacobi, FlatDataIsDegenerate) {
  const auto m = SubmanifoldModel::circle(kTwoPi, 64, 5);
  EXPECT_TRUE(jacobi_nondegeneracy(m).degenerate);
}

namespace {
void set_identity_potential(SubmanifoldModel& m, double s) {
  // V_{lm} = Σ g̃^{ab} R_{mabl}; k = 1 so R_{m00l} = s δ_ml gives V = s I.
  for (std::size_t n = 0; n < m.size(); ++n)
    for (int l = 0; l < m.N(); ++l) m.curvature.mixed(n, l, 0, 0, l) = s;
}
}  // namespace

TEST(Jacobi, IdentityShiftIsNondegenerate) {
  auto m = SubmanifoldModel::circle(kTwoPi, 64, 5);
  set_identity_potential(m, 1.0);
  const auto j = jacobi_nondegeneracy(m);
  EXPECT_FALSE(j.degenerate);
  EXPECT_NEAR(j.sigma_min, 1.0, 1e-3);
}

TEST(Jacobi, ResonantShiftIsDegenerate) {
  auto m = SubmanifoldModel::circle(kTwoPi, 64, 5);
  const double lambda1 = distinct_positive_eigenvalues(m, 1)[0];
  set_identity_potential(m, -lambda1);
  EXPECT_TRUE(jacobi_nondegeneracy(m).degenerate);
}

TEST(Jacobi, FrameRelabelingInvariance) {
  const int N = 5;
  auto m = SubmanifoldModel::circle(kTwoPi, 64, N);
  for (std::size_t n = 0; n < m.size(); ++n)
    for (int l = 0; l < N; ++l)
      for (int q = 0; q < N; ++q) m.curvature.mixed(n, q, 0, 0, l) = 0.3 + 0.1 * l * (l == q) + 0.05 * (l + q);
  const int perm[N] = {3, 0, 4, 1, 2};
  auto p = m;
  for (std::size_t n = 0; n < m.size(); ++n)
    for (int l = 0; l < N; ++l)
      for (int q = 0; q < N; ++q) p.curvature.mixed(n, perm[q], 0, 0, perm[l]) = m.curvature.mixed(n, q, 0, 0, l);
  EXPECT_NEAR(jacobi_nondegeneracy(m).sigma_min, jacobi_nondegeneracy(p).sigma_min, 1e-10);
}
