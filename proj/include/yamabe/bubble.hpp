// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "yamabe/radial_grid.hpp"

namespace yamabe {

/// The dimension-N bubble w0 = α_N (1+r²)^{-γ} and its exponents.
struct BubbleFamily {
  int N = 7;
  long double alpha_ext = 0.0L;  // α_N in extended precision
  double alpha = 0.0;
  double p = 0.0;
  double gamma = 0.0;

  explicit BubbleFamily(int n);

  [[nodiscard]] double w0(double r) const;
  [[nodiscard]] double ln_w0(double r) const;
  [[nodiscard]] double dw0(double r) const;   // w0'
  [[nodiscard]] double d2w0(double r) const;  // w0''
  [[nodiscard]] double z0(double r) const { return r * dw0(r) + gamma * w0(r); }
  /// w0^p ln w0, computed as exp(p ln w0)·ln w0 from the closed-form log.
  [[nodiscard]] double w0p_ln_w0(double r) const;
  [[nodiscard]] double w0_pow(double r, double q) const;  // w0^q via the log
};

/// α_N (δ/(δ² + |x-y|²))^{(N-2)/2}. Throws Domain for δ ≤ 0.
[[nodiscard]] double eval_bubble(double delta, std::span<const double> center, std::span<const double> x, int N);

[[nodiscard]] RadialField sample_w0(const RadialGrid& grid, int N);

struct KernelSet {
  RadialField Z0;
  RadialField Z_radial;  // w0'
  RadialField Zeig;      // filled by compute_eigenpair
  double lambda0 = 0.0;
};

[[nodiscard]] KernelSet sample_kernels(const RadialGrid& grid, int N);

struct Eigenpair {
  double lambda0 = 0.0;
  RadialField Zeig;
  /// Eigenvalues of Δ + p w0^{p-1} ordered descending (λ0 first), for the
  /// uniqueness check.
  std::vector<double> leading;
};

/// Positive eigenpair of Δφ + p w0^{p-1} φ = λ φ on the truncated ball,
/// normalized so ∫ Z² = 1 and Z(0) > 0.
[[nodiscard]] Eigenpair compute_eigenpair(const RadialGrid& grid, int N, int count = 10);

/// Least-squares slope of ln(r^{(N-1)/2} Z) over r in [r_lo, r_hi].
[[nodiscard]] double tail_decay_slope(const RadialField& z, int N, double r_lo, double r_hi);

/// Richardson-extrapolated λ0 from runs at M and 2M (second-order rule).
struct EigenvalueStudy {
  double coarse = 0.0, fine = 0.0, finer = 0.0;
  double extrap_coarse = 0.0, extrap_fine = 0.0;
  [[nodiscard]] double agreement() const;
};
[[nodiscard]] EigenvalueStudy eigenvalue_study(double r_out, int intervals, int N);

}  // namespace yamabe
