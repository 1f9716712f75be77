// SPDX-License-Identifier: Apache-2.0
#include "yamabe/bubble.hpp"

#include <cmath>

#include "yamabe/error.hpp"
#include "yamabe/radial_operator.hpp"

namespace yamabe {

BubbleFamily::BubbleFamily(int n) : N(n) {
  YAMABE_REQUIRE(n >= 3, ErrorKind::InvalidArgument, "BubbleFamily: N must be >= 3");
  const long double nn = n;
  alpha_ext = std::pow(nn * (nn - 2.0L), (nn - 2.0L) / 4.0L);
  alpha = static_cast<double>(alpha_ext);
  p = static_cast<double>((nn + 2.0L) / (nn - 2.0L));
  gamma = 0.5 * (n - 2);
}

double BubbleFamily::w0(double r) const { return alpha * std::pow(1.0 + r * r, -gamma); }

double BubbleFamily::ln_w0(double r) const {
  return static_cast<double>(std::log(alpha_ext)) - gamma * std::log1p(r * r);
}

double BubbleFamily::dw0(double r) const { return -(N - 2) * r * w0(r) / (1.0 + r * r); }

double BubbleFamily::d2w0(double r) const {
  const double s = 1.0 + r * r;
  const double w = w0(r);
  // d/dr [-(N-2) r w / s]
  return -(N - 2) * (w / s + r * dw0(r) / s - 2.0 * r * r * w / (s * s));
}

double BubbleFamily::w0_pow(double r, double q) const { return std::exp(q * ln_w0(r)); }

double BubbleFamily::w0p_ln_w0(double r) const {
  const double l = ln_w0(r);
  return std::exp(p * l) * l;
}

double eval_bubble(double delta, std::span<const double> center, std::span<const double> x, int N) {
  YAMABE_REQUIRE(delta > 0.0 && std::isfinite(delta), ErrorKind::Domain, "eval_bubble: delta must be > 0");
  YAMABE_REQUIRE(center.size() == x.size(), ErrorKind::InvalidArgument, "eval_bubble: dimension mismatch");
  long double d2 = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double d = static_cast<long double>(x[i]) - center[i];
    d2 += d * d;
  }
  const BubbleFamily b(N);
  const long double dl = delta;
  return static_cast<double>(b.alpha_ext * std::pow(dl / (dl * dl + d2), (N - 2) / 2.0L));
}

RadialField sample_w0(const RadialGrid& grid, int N) {
  const BubbleFamily b(N);
  auto f = RadialField::sample(grid, [&](double r) { return b.w0(r); });
  f.values[0] = b.alpha;
  return f;
}

KernelSet sample_kernels(const RadialGrid& grid, int N) {
  const BubbleFamily b(N);
  KernelSet k;
  k.Z0 = RadialField::sample(grid, [&](double r) { return b.z0(r); });
  k.Z_radial = RadialField::sample(grid, [&](double r) { return b.dw0(r); });
  return k;
}

Eigenpair compute_eigenpair(const RadialGrid& grid, int N, int count) {
  const BubbleFamily b(N);
  const auto pot = RadialField::sample(grid, [&](double r) { return -b.p * b.w0_pow(r, b.p - 1.0); });
  const RadialOperator op(0, N, pot);
  const auto sym = op.symmetric_form();
  const auto pairs = sym_eig_smallest(sym, std::min<int>(count, static_cast<int>(sym.size())));

  Eigenpair out;
  for (const auto& pr : pairs) out.leading.push_back(-pr.value);
  const double lambda = -pairs.front().value;
  if (!(lambda > 0.0)) throw Error(ErrorKind::SpectralFailure, "compute_eigenpair: no positive eigenvalue");
  out.lambda0 = lambda;

  // The ground state is rebuilt by shooting with the (bisection-accurate)
  // eigenvalue: outward from the origin, where the regular solution
  // dominates, and inward from R_out, where the decaying one does; the two
  // are matched at the turning point p w0^{p-1} = λ0. This keeps the tail
  // positive where inverse iteration leaves roundoff of either sign.
  const auto& k = op.stiffness();
  const auto& v = op.volumes();
  const double mu = pairs.front().value;
  const std::size_t m = op.unknowns();
  std::size_t match = 1;
  while (match + 2 < m && -pot[match] > lambda) ++match;
  std::vector<double> z(grid.size(), 0.0);
  z[0] = 1.0;
  for (std::size_t a = 0; a < match; ++a) {
    const double prev = a > 0 ? k.off[a - 1] * z[a - 1] : 0.0;
    z[a + 1] = ((mu * v[a] - k.diag[a]) * z[a] - prev) / k.off[a];
  }
  std::vector<double> t(grid.size(), 0.0);
  t[m - 1] = 1.0;
  for (std::size_t a = m - 1; a > match; --a) {
    const double next = a + 1 < m ? k.off[a] * t[a + 1] : 0.0;
    t[a - 1] = ((mu * v[a] - k.diag[a]) * t[a] - next) / k.off[a - 1];
    if (std::abs(t[a - 1]) > 1e150)
      for (std::size_t j = a - 1; j < m; ++j) t[j] *= 1e-150;
  }
  const double scale = z[match] / t[match];
  for (std::size_t a = match + 1; a < m; ++a) z[a] = t[a] * scale;
  if (z[0] < 0.0)
    for (double& x : z) x = -x;
  RadialField f(grid, std::move(z));
  const double nrm = std::sqrt(radial_inner(f, f, N));
  for (double& x : f.values) x /= nrm;
  out.Zeig = std::move(f);
  return out;
}

double tail_decay_slope(const RadialField& z, int N, double r_lo, double r_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = z.grid[i];
    if (r < r_lo || r > r_hi || !(z[i] > 0.0)) continue;
    const double y = std::log(z[i]) + 0.5 * (N - 1) * std::log(r);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++n;
  }
  YAMABE_REQUIRE(n >= 3, ErrorKind::InvalidArgument, "tail_decay_slope: fewer than 3 points in window");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double EigenvalueStudy::agreement() const { return std::abs(extrap_fine - extrap_coarse) / std::abs(extrap_fine); }

EigenvalueStudy eigenvalue_study(double r_out, int intervals, int N) {
  EigenvalueStudy s;
  const RadialGrid g(r_out, intervals);
  s.coarse = compute_eigenpair(g, N, 1).lambda0;
  s.fine = compute_eigenpair(g.refined(), N, 1).lambda0;
  s.finer = compute_eigenpair(g.refined().refined(), N, 1).lambda0;
  s.extrap_coarse = (4.0 * s.fine - s.coarse) / 3.0;
  s.extrap_fine = (4.0 * s.finer - s.fine) / 3.0;
  return s;
}

}  // namespace yamabe
