// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace yamabe {

/// Symmetric tridiagonal matrix: diag[0..n-1], off[i] couples i and i+1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

/// The `count` algebraically smallest eigenpairs by Sturm-sequence bisection
/// and inverse iteration; vectors are orthonormal in the Euclidean product.
[[nodiscard]] std::vector<EigenPair> sym_eig_smallest(const SymTridiagonal& t, int count);

/// Number of eigenvalues strictly below x (Sturm count).
[[nodiscard]] int sturm_count(const SymTridiagonal& t, double x);

/// Dense symmetric route. Throws ContractViolation if `a` is not symmetric
/// to within 1e-12 of its largest entry.
[[nodiscard]] std::vector<EigenPair> sym_eig_smallest(const Eigen::MatrixXd& a, int count);

/// LU with partial pivoting for a general tridiagonal system.
class TridiagonalLU {
 public:
  TridiagonalLU(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper);

  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;
  [[nodiscard]] bool singular() const noexcept { return singular_; }

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
  bool singular_ = false;
};

}  // namespace yamabe
