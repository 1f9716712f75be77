// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace yamabe {

/// Nodes r_i = R_out * (i/M)^s, i = 0..M, for the transverse radius.
///
/// The grading exponent s clusters nodes near the origin, where the bubble
/// has its curvature; s = 2 also makes the composite trapezoid rule behave
/// spectrally for smooth integrands that decay before R_out.
class RadialGrid {
 public:
  static constexpr int kMinIntervals = 64;

  RadialGrid() = default;
  RadialGrid(double r_out, int intervals, double grading = 2.0);

  /// Doubles the interval count at fixed R_out and grading.
  [[nodiscard]] RadialGrid refined() const { return {r_out_, 2 * intervals(), grading_}; }

  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return nodes_[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] int intervals() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  [[nodiscard]] double r_out() const noexcept { return r_out_; }
  [[nodiscard]] double grading() const noexcept { return grading_; }

  /// Trapezoid weights for ∫_0^{R_out} f(r) r^{dim-1} dr (no angular factor).
  [[nodiscard]] std::vector<double> trapezoid_weights(int dim) const;

  friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

 private:
  std::vector<double> nodes_;
  double r_out_ = 0.0;
  double grading_ = 2.0;
};

/// Samples of a radial function on a RadialGrid.
struct RadialField {
  RadialGrid grid;
  std::vector<double> values;

  RadialField() = default;
  RadialField(RadialGrid g, std::vector<double> v);

  static RadialField sample(const RadialGrid& grid, const std::function<double(double)>& f);

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values[i]; }
  [[nodiscard]] bool all_finite() const noexcept;
};

/// |S^{dim-1}| = 2 π^{dim/2} / Γ(dim/2).
[[nodiscard]] double sphere_area(int dim);

/// ∫_{|ξ|<R_out} f(|ξ|) dξ in dimension `dim` by the composite trapezoid rule
/// on the field's grid, summed left to right.
[[nodiscard]] double radial_quadrature(const RadialField& f, int dim);

/// Same rule applied to the pointwise product of two fields on one grid.
[[nodiscard]] double radial_inner(const RadialField& a, const RadialField& b, int dim);

}  // namespace yamabe
