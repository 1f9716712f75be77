// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "yamabe/manifold.hpp"

namespace yamabe {

/// Attractive: -Δu + αu - β/u = 0.  Repulsive: -Δu + αu + β/u = 0.
enum class Singularity { Attractive, Repulsive };

struct SingularProblem {
  SingularProblem(const SubmanifoldModel& m, std::vector<double> a, std::vector<double> b, Singularity s);

  const SubmanifoldModel* model;
  std::vector<double> alpha;
  std::vector<double> beta;
  Singularity sign;

  [[nodiscard]] bool constant_coefficients() const;
  /// Nodewise -Δu + αu ∓ β/u.
  [[nodiscard]] std::vector<double> residual(const std::vector<double>& u) const;
  /// ∫_K (αu ∓ β/u), which vanishes for an exact discrete solution.
  [[nodiscard]] double integral_identity(const std::vector<double>& u) const;
};

struct SingularSolution {
  std::vector<double> u;
  double residual_norm = 0.0;
  bool nondegenerate = false;
  std::vector<double> linearized_eigs;  // smallest few, ascending
  double min_abs_eig = 0.0;             // over the whole spectrum
  int monotone_steps = 0;
  int newton_steps = 0;
  bool monotone = true;  // attractive only: u_{n+1} <= u_n held at every step
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

[[nodiscard]] Bracket bracket_constants(const SingularProblem& problem);

/// Shifted monotone iteration from the upper bracket on the second-order
/// stencil, followed by Newton on the model's own Laplacian.
[[nodiscard]] SingularSolution solve_attractive(const SingularProblem& problem, double tol = 1e-12);

/// Ascending eigenvalues of -Δ + α + β/u²; throws Degeneracy if the smallest is not positive.
[[nodiscard]] std::vector<double> certify_attractive_nondegeneracy(const SingularProblem& problem,
                                                                   const std::vector<double>& u, int count = 6);

struct Feasibility {
  bool feasible = false;
  double min_alpha = 0.0;
  std::string reason;
};
[[nodiscard]] Feasibility repulsive_feasibility(const SingularProblem& problem);

/// -((κ+1)π/(2ℓ))² < alpha_max < -(κπ/(2ℓ))², evaluated as written.
[[nodiscard]] bool window_check(double length, double alpha_max, int kappa);

/// True when 2a sits strictly between -λ_{κ+1} and -λ_κ for some κ >= 0 of
/// the model's own spectrum (λ_0 = 0), i.e. 2a is not minus an eigenvalue.
[[nodiscard]] bool spectral_window(const SubmanifoldModel& model, double a);

/// Newton with a positivity floor; homotopy in (α, β) from their averages
/// for nonconstant coefficients unless a seed is given.
[[nodiscard]] SingularSolution solve_repulsive(const SingularProblem& problem, double tol = 1e-12,
                                               const std::optional<std::vector<double>>& seed = std::nullopt);

/// Eigenvalues of the linearization -Δ + α ± β/u² (all of them, ascending).
[[nodiscard]] std::vector<double> linearized_spectrum(const SingularProblem& problem, const std::vector<double>& u);

}  // namespace yamabe
