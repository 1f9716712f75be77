// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "yamabe/radial_grid.hpp"

namespace yamabe {

/// a_N = 4(N-1)/((N-2)(N+2)), b_N = (N-2)²(N-4)/(2(N+2)).
[[nodiscard]] double closed_form_a(int N);
[[nodiscard]] double closed_form_b(int N);

struct ProjectionConstants {
  int N = 0;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, C0 = 0;
  double a_N = 0, b_N = 0;

  [[nodiscard]] double ratio_a() const { return -c3 / c1; }  // |c3|/c1
  [[nodiscard]] double ratio_b() const { return c4 / c1; }
  [[nodiscard]] double ratio_c2() const { return c2 / c1; }
  [[nodiscard]] double target_c2() const { return 3.0 / (N + 2); }
};

/// Grid used when none is given: R_out = 1e4, M = 4096, s = 2.
[[nodiscard]] RadialGrid default_constants_grid();

/// All integrals reduced to radial quadrature:
///   c1 = ∫Z0², c2 = (1/N)∫ r w0' Z0, c3 = ∫ w0 Z0,
///   c4 = N/(p+1)² ∫ w0^{p+1}, C0 = (1/N)∫ w0'².
/// Throws ComputationFailed if the sign pattern is violated.
[[nodiscard]] ProjectionConstants compute_constants(int N, const RadialGrid& grid);

/// ∫ Z0 T1(w0) with T1 = r² w0'' + 2(1+γ) r w0' + γ(1+γ) w0.
[[nodiscard]] double verify_T1_orthogonality(int N, const RadialGrid& grid);

/// ∫ ξ_l ∂²_{sl} w0 ∂_s w0 (l ≠ s) = (1/(N(N+2))) ∫ (r w0' w0'' - w0'²).
[[nodiscard]] double verify_second_derivative_identity(int N, const RadialGrid& grid);

}  // namespace yamabe
