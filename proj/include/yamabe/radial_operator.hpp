// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "yamabe/radial_grid.hpp"
#include "yamabe/tridiagonal.hpp"

namespace yamabe {

/// Discretization of
///   -φ'' - (N-1)/r φ' + ℓ(ℓ+N-2)/r² φ + potential·φ,   Dirichlet at R_out.
///
/// For ℓ ≥ 1 the operator acts on ψ = φ/r^ℓ, which satisfies the ℓ = 0
/// equation in dimension N+2ℓ; this keeps φ(0) = 0 and the second order of
/// the scheme at the origin. All modes are then one finite-volume scheme:
/// K ψ = V (A' ψ), K exactly symmetric over nodes 0..M-1, V the cell volumes
/// in dimension N+2ℓ. The symmetric form is V^{-1/2} K V^{-1/2}.
class RadialOperator {
 public:
  RadialOperator(int mode, int dim, const RadialField& potential);
  RadialOperator(int mode, int dim, const RadialGrid& grid);  // zero potential

  [[nodiscard]] int mode() const noexcept { return mode_; }
  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int reduced_dim() const noexcept { return dim_ + 2 * mode_; }
  [[nodiscard]] const RadialGrid& grid() const noexcept { return grid_; }
  /// Rows carrying an equation for φ: [first(), last()].
  [[nodiscard]] std::size_t first() const noexcept { return mode_ == 0 ? 0 : 1; }
  [[nodiscard]] std::size_t last() const noexcept { return grid_.size() - 2; }
  /// Unknowns are ψ at nodes 0..M-1.
  [[nodiscard]] std::size_t unknowns() const noexcept { return grid_.size() - 1; }

  [[nodiscard]] const SymTridiagonal& stiffness() const noexcept { return k_; }
  [[nodiscard]] const std::vector<double>& volumes() const noexcept { return vol_; }
  /// Coupling of row M-1 to the boundary value ψ_M.
  [[nodiscard]] double right_coupling() const noexcept { return right_; }

  /// ψ = φ/r^ℓ on all nodes; ψ(0) by even extrapolation in r for ℓ ≥ 1.
  [[nodiscard]] std::vector<double> reduce(const std::vector<double>& phi) const;
  /// φ = r^ℓ ψ.
  [[nodiscard]] std::vector<double> expand(const std::vector<double>& psi) const;

  /// (A φ)_i at rows first()..last() from the full nodal vector φ (boundary
  /// values as given). Other rows are 0.
  [[nodiscard]] std::vector<double> apply(const std::vector<double>& phi) const;

  [[nodiscard]] SymTridiagonal symmetric_form() const;
  [[nodiscard]] Eigen::MatrixXd symmetric_dense() const;

 private:
  void assemble(const std::vector<double>* potential);

  int mode_ = 0;
  int dim_ = 0;
  RadialGrid grid_;
  SymTridiagonal k_;
  std::vector<double> vol_;
  double right_ = 0.0;
};

/// Named entry point: validates ℓ and builds the operator.
[[nodiscard]] RadialOperator radial_operator_matrix(int mode, int dim, const RadialField& potential);

/// max over equation rows of |(A u)_i - f_i|.
[[nodiscard]] double max_row_residual(const RadialOperator& op, const std::vector<double>& u,
                                      const std::vector<double>& f);

/// log2(e_coarse / e_fine).
[[nodiscard]] double observed_order(double e_coarse, double e_fine);

/// Value at r = 0 of an even function from samples at r1, r2 (quadratic in r).
[[nodiscard]] double even_extrapolate_origin(double r1, double f1, double r2, double f2);

}  // namespace yamabe
