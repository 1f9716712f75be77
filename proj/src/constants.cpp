// SPDX-License-Identifier: Apache-2.0
#include "yamabe/constants.hpp"

#include "yamabe/bubble.hpp"
#include "yamabe/error.hpp"

namespace yamabe {

double closed_form_a(int N) { return 4.0 * (N - 1) / (static_cast<double>(N - 2) * (N + 2)); }

double closed_form_b(int N) { return static_cast<double>(N - 2) * (N - 2) * (N - 4) / (2.0 * (N + 2)); }

RadialGrid default_constants_grid() { return {1e4, 4096, 2.0}; }

namespace {

double integrate(const RadialGrid& grid, int N, auto&& f) {
  return radial_quadrature(RadialField::sample(grid, f), N);
}

}  // namespace

ProjectionConstants compute_constants(int N, const RadialGrid& grid) {
  YAMABE_REQUIRE(N >= 5, ErrorKind::InvalidArgument, "compute_constants: N must be >= 5");
  const BubbleFamily b(N);
  ProjectionConstants c;
  c.N = N;
  c.c1 = integrate(grid, N, [&](double r) { return b.z0(r) * b.z0(r); });
  c.c2 = integrate(grid, N, [&](double r) { return r * b.dw0(r) * b.z0(r); }) / N;
  c.c3 = integrate(grid, N, [&](double r) { return b.w0(r) * b.z0(r); });
  c.c4 = N / ((b.p + 1.0) * (b.p + 1.0)) * integrate(grid, N, [&](double r) { return b.w0_pow(r, b.p + 1.0); });
  c.C0 = integrate(grid, N, [&](double r) { return b.dw0(r) * b.dw0(r); }) / N;
  c.a_N = closed_form_a(N);
  c.b_N = closed_form_b(N);
  YAMABE_REQUIRE(c.c1 > 0 && c.c2 > 0 && c.c4 > 0 && c.C0 > 0 && c.c3 < 0, ErrorKind::ComputationFailed,
                 "compute_constants: sign pattern violated");
  return c;
}

double verify_T1_orthogonality(int N, const RadialGrid& grid) {
  const BubbleFamily b(N);
  const double g = b.gamma;
  return integrate(grid, N, [&](double r) {
    const double t1 = r * r * b.d2w0(r) + 2.0 * (1.0 + g) * r * b.dw0(r) + g * (1.0 + g) * b.w0(r);
    return b.z0(r) * t1;
  });
}

double verify_second_derivative_identity(int N, const RadialGrid& grid) {
  const BubbleFamily b(N);
  const double s = integrate(grid, N, [&](double r) {
    const double d1 = b.dw0(r);
    return r * d1 * b.d2w0(r) - d1 * d1;
  });
  return s / (static_cast<double>(N) * (N + 2));
}

}  // namespace yamabe
