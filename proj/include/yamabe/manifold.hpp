// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace yamabe {

enum class ManifoldKind { Circle, Torus };
enum class LaplacianScheme { Stencil, Fourier };

/// Curvature data per node. Index conventions:
///   normal(n, m, i, j, l) = R_{mijl}, all four indices normal;
///   mixed(n, m, a, b, j)  = R_{mabj}, m, j normal and a, b tangent;
///   g(n, a, b)            = g̃_ab;
///   gamma(n, a, b, i)     = Γ^b_{ai} = g(∇_{E_a} E_b, E_i).
/// The sign convention is R_{abab} = sectional curvature.
struct CurvatureData {
  int N = 0;
  int k = 0;
  std::size_t nodes = 0;
  std::vector<double> R_normal, R_mixed, g_tilde, Gamma;

  CurvatureData() = default;
  CurvatureData(int n_normal, int k_tangent, std::size_t n_nodes);  // zero curvature, g̃ = I

  double& normal(std::size_t n, int m, int i, int j, int l) { return R_normal[idx4(n, m, i, j, l, N, N, N, N)]; }
  [[nodiscard]] double normal(std::size_t n, int m, int i, int j, int l) const {
    return R_normal[idx4(n, m, i, j, l, N, N, N, N)];
  }
  double& mixed(std::size_t n, int m, int a, int b, int j) { return R_mixed[idx4(n, m, a, b, j, N, k, k, N)]; }
  [[nodiscard]] double mixed(std::size_t n, int m, int a, int b, int j) const {
    return R_mixed[idx4(n, m, a, b, j, N, k, k, N)];
  }
  double& g(std::size_t n, int a, int b) { return g_tilde[(n * k + a) * k + b]; }
  [[nodiscard]] double g(std::size_t n, int a, int b) const { return g_tilde[(n * k + a) * k + b]; }
  double& gamma(std::size_t n, int a, int b, int i) { return Gamma[((n * k + a) * k + b) * N + i]; }
  [[nodiscard]] double gamma(std::size_t n, int a, int b, int i) const { return Gamma[((n * k + a) * k + b) * N + i]; }

  /// Fills every node with ambient constant curvature c:
  /// R_{ABCD} = c (g_AC g_BD - g_AD g_BC) restricted to the index blocks.
  void set_constant_curvature(double c);

  /// Throws InvalidField on a broken antisymmetry or a non-SPD g̃.
  void validate() const;

  [[nodiscard]] Eigen::MatrixXd g_inverse(std::size_t n) const;

 private:
  static std::size_t idx4(std::size_t n, int a, int b, int c, int d, int na, int nb, int nc, int nd) {
    return (((n * na + a) * nb + b) * nc + c) * nd + d;
  }
};

/// A closed flat model K: a circle or a flat 2-torus on a uniform periodic
/// grid, carrying curvature data and the potential h.
class SubmanifoldModel {
 public:
  static constexpr int kMinNodesPerDim = 32;

  SubmanifoldModel(ManifoldKind kind, std::vector<double> lengths, std::vector<int> counts, int N,
                   LaplacianScheme scheme = LaplacianScheme::Stencil);

  static SubmanifoldModel circle(double length, int n, int N, LaplacianScheme s = LaplacianScheme::Stencil);
  static SubmanifoldModel torus(double l1, double l2, int n1, int n2, int N,
                                LaplacianScheme s = LaplacianScheme::Stencil);

  [[nodiscard]] ManifoldKind kind() const noexcept { return kind_; }
  [[nodiscard]] LaplacianScheme scheme() const noexcept { return scheme_; }
  [[nodiscard]] int k() const noexcept { return static_cast<int>(counts_.size()); }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const std::vector<double>& lengths() const noexcept { return lengths_; }
  [[nodiscard]] const std::vector<int>& counts() const noexcept { return counts_; }
  [[nodiscard]] double spacing(int d) const { return lengths_[d] / counts_[d]; }
  [[nodiscard]] double coordinate(std::size_t node, int d) const;
  /// Periodic neighbour of `node` shifted by `step` along direction d.
  [[nodiscard]] std::size_t neighbor(std::size_t node, int d, int step) const;
  [[nodiscard]] double cell_volume() const;

  CurvatureData curvature;
  std::vector<double> h;

  /// Δ_K as a sparse matrix (second-order stencil, or the dense Fourier
  /// matrix stored sparse when scheme() is Fourier).
  [[nodiscard]] Eigen::SparseMatrix<double> laplacian() const;
  [[nodiscard]] Eigen::MatrixXd laplacian_dense() const;
  [[nodiscard]] std::vector<double> apply_laplacian(const std::vector<double>& f) const;
  /// Central-difference derivative along direction d.
  [[nodiscard]] std::vector<double> derivative(const std::vector<double>& f, int d) const;
  /// Σ_a (∂_a f)² by central differences.
  [[nodiscard]] std::vector<double> gradient_sq(const std::vector<double>& f) const;
  /// Periodic trapezoid (= rectangle) rule.
  [[nodiscard]] double integrate(const std::vector<double>& f) const;

 private:
  ManifoldKind kind_;
  LaplacianScheme scheme_;
  std::vector<double> lengths_;
  std::vector<int> counts_;
  int N_;
  std::size_t size_ = 0;
};

/// Smallest `count` eigenvalues of -Δ_K, numerically.
[[nodiscard]] std::vector<double> laplace_eigenvalues(const SubmanifoldModel& model, int count);
/// Same from the closed form for the model's scheme.
[[nodiscard]] std::vector<double> laplace_eigenvalues_exact(const SubmanifoldModel& model, int count);
/// Distinct positive values of the exact spectrum, ascending (λ_1 < λ_2 < …).
[[nodiscard]] std::vector<double> distinct_positive_eigenvalues(const SubmanifoldModel& model, int count);

/// max over nodes and normal i of |Σ_a Γ^a_{ia}|.
[[nodiscard]] double check_minimality(const SubmanifoldModel& model);
[[nodiscard]] inline bool is_minimal(const SubmanifoldModel& model) { return check_minimality(model) <= 1e-12; }

/// Ω̂ = sign · 3(N-2)/(4(N-1)) [ (1/3) Σ R_{jiji} + Σ g̃^{ab} R_{iaib} + Σ Γ^b_{ai} Γ^a_{bi} ].
[[nodiscard]] double compute_omega(const SubmanifoldModel& model, std::size_t node, int sign = +1);
[[nodiscard]] std::vector<double> omega_field(const SubmanifoldModel& model, int sign = +1);

/// S_{ml} = Σ_i R_{miil}.
[[nodiscard]] Eigen::MatrixXd normal_trace_matrix(const SubmanifoldModel& model, std::size_t node);
/// M_{mj} = (2/3) Σ_s R_{mssj} + Σ_{ab} (g̃^{ab} R_{mabj} - Γ^b_{am} Γ^a_{bj}).
[[nodiscard]] Eigen::MatrixXd first_order_matrix(const SubmanifoldModel& model, std::size_t node);
/// V_{ℓm} = Σ_{ab} (g̃^{ab} R_{mabℓ} - Γ^b_{am} Γ^a_{bℓ}).
[[nodiscard]] Eigen::MatrixXd jacobi_potential(const SubmanifoldModel& model, std::size_t node);

/// -Δ_K ⊗ I + V on the stacked unknowns (component-major within a node).
[[nodiscard]] Eigen::SparseMatrix<double> jacobi_operator(const SubmanifoldModel& model);

struct JacobiCheck {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool degenerate = true;
};
[[nodiscard]] JacobiCheck jacobi_nondegeneracy(const SubmanifoldModel& model);

/// Smallest singular value by inverse iteration on (AᵀA)^{-1}; 0 if the
/// factorization fails. Largest by power iteration on AᵀA.
[[nodiscard]] JacobiCheck singular_value_bounds(const Eigen::SparseMatrix<double>& a, double rel_threshold = 1e-8);

}  // namespace yamabe
