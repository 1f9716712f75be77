// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace yamabe {

/// Fully symmetric degree-5 cubature on S^{n-1}: the 2n points ±e_i and the
/// 2n(n-1) points (±e_i ± e_j)/√2, weights normalized to total 1 (so sums
/// approximate the mean over the sphere). For n > 4 the axis weight is
/// negative; the rule is still exact on polynomials of degree ≤ 5.
struct SphereRule {
  int dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
};

[[nodiscard]] SphereRule sphere_rule(int dim);

}  // namespace yamabe
