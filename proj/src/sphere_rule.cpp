// SPDX-License-Identifier: Apache-2.0
#include "yamabe/sphere_rule.hpp"

#include <cmath>

#include "yamabe/error.hpp"

namespace yamabe {

SphereRule sphere_rule(int n) {
  YAMABE_REQUIRE(n >= 2, ErrorKind::InvalidArgument, "sphere_rule: dimension must be >= 2");
  SphereRule rule;
  rule.dim = n;
  const double denom = static_cast<double>(n) * (n + 2);
  const double axis = (4.0 - n) / (2.0 * denom);
  const double diag = 1.0 / denom;
  for (int i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> x(n, 0.0);
      x[i] = s;
      rule.points.push_back(std::move(x));
      rule.weights.push_back(axis);
    }
  const double c = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          std::vector<double> x(n, 0.0);
          x[i] = si * c;
          x[j] = sj * c;
          rule.points.push_back(std::move(x));
          rule.weights.push_back(diag);
        }
  return rule;
}

}  // namespace yamabe
