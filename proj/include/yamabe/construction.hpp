// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "yamabe/constants.hpp"
#include "yamabe/manifold.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/radial_grid.hpp"
#include "yamabe/singular_pde.hpp"

namespace yamabe {

/// Subcritical: exponent p - ε, attractive reduced equation.
/// Supercritical: exponent p + ε, repulsive reduced equation.
enum class Regime { Subcritical, Supercritical };

/// +1 for supercritical, -1 for subcritical (the upper/lower of ±).
[[nodiscard]] inline int regime_sign(Regime r) { return r == Regime::Supercritical ? 1 : -1; }

struct WeightedNormSpec {
  double r = 5.0;
  double sigma = 0.5;
  double eps = 0.01;
  /// 0 < sigma < 1, 0 < eps < 1 and r an integer with 4 < r < N.
  void validate(int N) const;
};

/// One K-node's transverse field: m0(r) + m2(r) θᵀQθ + Σ_j m1[j](r) θ_j,
/// with Q symmetric and traceless. Empty profiles mean the mode is absent.
struct ModeProfile {
  std::vector<double> m0;
  std::vector<double> m2;
  Eigen::MatrixXd Q;
  std::vector<std::vector<double>> m1;

  [[nodiscard]] double value(std::size_t i, const std::vector<double>& theta) const;
  /// sup over the unit sphere at radial index i.
  [[nodiscard]] double sup_abs(std::size_t i) const;
};

struct ModeField {
  RadialGrid grid;
  int N = 0;
  std::vector<ModeProfile> nodes;

  [[nodiscard]] bool all_finite() const;
};

/// sup_i (1 + r_i²)^{r/2} |w_i|. Accepts any r ≥ 0.
[[nodiscard]] double weighted_norm(const RadialField& w, double r);
[[nodiscard]] double weighted_norm(const RadialField& w, const WeightedNormSpec& spec);
/// sup over K-nodes, radii and directions (exact in θ for modes 0 and 2).
[[nodiscard]] double weighted_norm(const ModeField& w, double r);
[[nodiscard]] double weighted_norm(const ModeField& w, const WeightedNormSpec& spec);
/// Adds sup (1 + r_c²)^{(r+σ)/2} |w_i - w_j| / |r_i - r_j|^σ over radial
/// node pairs within unit distance, r_c their midpoint.
[[nodiscard]] double weighted_holder_norm(const RadialField& w, const WeightedNormSpec& spec);

struct TTerms {
  RadialField T1;
  ModeProfile T2;
  ModeProfile T3;
};

/// T1 = r²w0'' + 2(1+γ) r w0' + γ(1+γ) w0,
/// T2 = (r w0'/3) θᵀSθ, T3 = r w0' θᵀMθ, split into trace and traceless parts.
[[nodiscard]] TTerms assemble_T_terms(const SubmanifoldModel& model, std::size_t node, const RadialGrid& grid);

/// Coefficients of the reduced equation: α = ratio_a·H, β = ratio_b, with
/// H = h - Ω̂ (Ω̂ under the given sign convention).
struct Mu0Result {
  std::vector<double> mu0;
  std::vector<double> H;
  SingularSolution solution;
};
[[nodiscard]] Mu0Result solve_mu0(const SubmanifoldModel& model, Regime regime, const ProjectionConstants& c,
                                  int omega_sign = +1, double tol = 1e-12);

/// The first-order error H1 at one K-node, as mode-0 plus mode-2 profiles:
/// μ0Δμ0 Z0 - |∇μ0|² T1 + μ0²(T2 - T3) + μ0² h w0 ∓ w0^p ln w0.
[[nodiscard]] ModeProfile assemble_H1(const SubmanifoldModel& model, const std::vector<double>& mu0,
                                      std::size_t node, const RadialGrid& grid, Regime regime);
/// Same quantity evaluated pointwise from the full curvature tensors at ξ = rθ.
[[nodiscard]] double evaluate_H1_direct(const SubmanifoldModel& model, const std::vector<double>& mu0,
                                        std::size_t node, double r, const std::vector<double>& theta, Regime regime);

struct LinearSolveOptions {
  WeightedNormSpec spec;
  /// |∫h Z| must be ≤ orth_rel·‖h‖‖Z‖ + orth_abs (radial inner products).
  double orth_rel = 1e-8;
  std::vector<double> orth_abs;  // per node; empty means 0
  Execution exec = Execution::Parallel;
};

struct LinearSolveResult {
  ModeField phi;
  double norm_ratio = 0.0;           // ‖φ‖_{ε,r-2} / ‖h‖_{ε,r}
  double constraint_residual = 0.0;  // max relative |∫φZ| over nodes and modes
};

/// Solves -Δφ - p w0^{p-1} φ + ε a φ = h per node and mode with φ = 0 at
/// R_out, removing Z0 (mode 0) and w0' (mode 1) by a Lagrange multiplier.
[[nodiscard]] LinearSolveResult linear_solve(const std::vector<double>& a, const ModeField& h,
                                             const LinearSolveOptions& opt);

/// -Δμ1 + (α + σβ/μ0²) μ1 = σ (N-2)² β / (16 μ0), σ = +1 subcritical, -1
/// supercritical: the linearization of the μ0 equation with its first-order source.
[[nodiscard]] std::vector<double> solve_mu1(const SubmanifoldModel& model, const std::vector<double>& mu0,
                                            Regime regime, const ProjectionConstants& c, int omega_sign = +1);

/// Solves Δ_K Φ - VΦ = G, i.e. (-Δ_K + V)Φ = -G, with the stacked layout
/// index = node·N + component. Throws Precondition on a degenerate Jacobi operator.
[[nodiscard]] std::vector<double> solve_phi1(const SubmanifoldModel& model, const std::vector<double>& G);

/// α_ε with (1 + α_ε)^{p-1±ε} ε^{∓(N-2)ε/4} = 1.
[[nodiscard]] double alpha_eps(double eps, int N, Regime regime);
/// (1 + α)^{p-1±ε} ε^{∓(N-2)ε/4}; equals 1 for α = alpha_eps.
[[nodiscard]] double alpha_eps_identity(double alpha, double eps, int N, Regime regime);

enum class Version { V0, V1 };

struct ConstructionOptions {
  Regime regime = Regime::Subcritical;
  int omega_sign = +1;
  double eta = 1.0;
  int intervals = 2048;
  double grading = 2.0;
  int r_weight = 5;
  Execution exec = Execution::Parallel;
};

struct ConstructionState {
  double eps = 0.0;
  int N = 0;
  Regime regime = Regime::Subcritical;
  ProjectionConstants constants;
  std::vector<double> mu0, H, mu1, Phi1;
  bool phi1_solved = false;
  std::string phi1_note;
  RadialGrid grid;
  ModeField H1;
  std::optional<ModeField> w1;
  double alpha_eps = 0.0;
  double w1_norm_ratio = 0.0;
  double w1_constraint_residual = 0.0;
};

/// μ0 from the reduced equation, then H1 and (for V1) w1 on the truncated
/// ball of radius η ε^{-1/2}. μ1 and Φ1 are solved and stored alongside.
[[nodiscard]] ConstructionState build_state(const SubmanifoldModel& model, double eps, Version version,
                                            const ProjectionConstants& c, const ConstructionOptions& opt);

struct ResidualResult {
  double norm = 0.0;  // ‖Ξ_ε‖_{ε,N-2}
  std::size_t directions = 0;
  /// max over nodes, interior radii and directions of the weighted residual,
  /// per node (the norm is the max of these).
  std::vector<double> per_node;
};

/// Ξ_ε(v) = -A v + ε μ² h v - μ^{∓ε(N-2)/2} v^{p±ε}, modes 0-2, with
/// v = w0 (V0) or w0 + w1 (V1) and μ_ε = μ0, Φ_ε = 0. Interior radial nodes only.
[[nodiscard]] ResidualResult residual(const ConstructionState& state, const SubmanifoldModel& model, Version version,
                                      Execution exec = Execution::Parallel);

struct ScalingResult {
  std::vector<double> eps;
  std::vector<double> norms;
  double slope = 0.0;
  bool monotone = true;
};

/// Least-squares slope of log‖Ξ_ε‖ against log ε.
[[nodiscard]] ScalingResult scaling_study(const SubmanifoldModel& model, Version version,
                                          const std::vector<double>& eps_list, const ProjectionConstants& c,
                                          const ConstructionOptions& opt);

[[nodiscard]] double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace yamabe
