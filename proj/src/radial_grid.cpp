// SPDX-License-Identifier: Apache-2.0
#include "yamabe/radial_grid.hpp"

#include <cmath>
#include <numbers>

#include "yamabe/error.hpp"

namespace yamabe {

RadialGrid::RadialGrid(double r_out, int intervals, double grading) : r_out_(r_out), grading_(grading) {
  YAMABE_REQUIRE(std::isfinite(r_out) && r_out > 1.0, ErrorKind::InvalidArgument,
                 "RadialGrid: R_out must be finite and > 1");
  YAMABE_REQUIRE(intervals >= kMinIntervals, ErrorKind::InvalidArgument,
                 "RadialGrid: need at least 64 intervals");
  YAMABE_REQUIRE(grading >= 1.0, ErrorKind::InvalidArgument, "RadialGrid: grading must be >= 1");
  nodes_.resize(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double t = static_cast<double>(i) / intervals;
    nodes_[i] = r_out * std::pow(t, grading);
  }
  nodes_.front() = 0.0;
  nodes_.back() = r_out;
}

std::vector<double> RadialGrid::trapezoid_weights(int dim) const {
  const std::size_t n = nodes_.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? nodes_[i] - nodes_[i - 1] : 0.0;
    const double right = i + 1 < n ? nodes_[i + 1] - nodes_[i] : 0.0;
    w[i] = 0.5 * (left + right) * std::pow(nodes_[i], dim - 1);
  }
  return w;
}

RadialField::RadialField(RadialGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  YAMABE_REQUIRE(values.size() == grid.size(), ErrorKind::InvalidArgument,
                 "RadialField: value count does not match grid");
}

RadialField RadialField::sample(const RadialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return {grid, std::move(v)};
}

bool RadialField::all_finite() const noexcept {
  for (double x : values)
    if (!std::isfinite(x)) return false;
  return true;
}

double sphere_area(int dim) {
  YAMABE_REQUIRE(dim >= 1, ErrorKind::InvalidArgument, "sphere_area: dimension must be >= 1");
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double radial_quadrature(const RadialField& f, int dim) {
  YAMABE_REQUIRE(f.all_finite(), ErrorKind::InvalidField, "radial_quadrature: non-finite sample");
  const auto w = f.grid.trapezoid_weights(dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * f.values[i];
  return sphere_area(dim) * sum;
}

double radial_inner(const RadialField& a, const RadialField& b, int dim) {
  YAMABE_REQUIRE(a.grid == b.grid, ErrorKind::InvalidArgument, "radial_inner: grids differ");
  YAMABE_REQUIRE(a.all_finite() && b.all_finite(), ErrorKind::InvalidField,
                 "radial_inner: non-finite sample");
  const auto w = a.grid.trapezoid_weights(dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * a.values[i] * b.values[i];
  return sphere_area(dim) * sum;
}

}  // namespace yamabe
