// SPDX-License-Identifier: Apache-2.0
#include "yamabe/singular_pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SparseLU>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double mean(const SubmanifoldModel& model, const std::vector<double>& f) {
  double vol = 1.0;
  for (double l : model.lengths()) vol *= l;
  return model.integrate(f) / vol;
}

// Jacobian of the residual: -Δ + α ± β/u², with + for the attractive sign.
Eigen::SparseMatrix<double> jacobian(const SingularProblem& p, const std::vector<double>& u) {
  Eigen::SparseMatrix<double> j = -p.model->laplacian();
  const double s = p.sign == Singularity::Attractive ? 1.0 : -1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    j.coeffRef(ii, ii) += p.alpha[i] + s * p.beta[i] / (u[i] * u[i]);
  }
  j.makeCompressed();
  return j;
}

struct NewtonResult {
  std::vector<double> u;
  double residual = 0.0;
  int steps = 0;
  bool converged = false;
  bool floor_hit = false;
};

// Newton with backtracking that keeps u above `floor` and decreases the max residual.
NewtonResult newton(const SingularProblem& p, std::vector<double> u, double tol, double floor, int max_steps = 60) {
  NewtonResult out;
  std::vector<double> f = p.residual(u);
  double res = max_abs(f);
  // A residual below the rounding level of evaluating it is accepted as is,
  // which matters when the Jacobian is singular at an exact solution.
  {
    const Eigen::SparseMatrix<double> lap = p.model->laplacian();
    double lap_norm = 0.0;
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(lap.rows());
    for (Eigen::Index c = 0; c < lap.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(lap, c); it; ++it) rows(it.row()) += std::abs(it.value());
    lap_norm = rows.maxCoeff();
    const double umax = max_abs(u);
    const double umin = *std::min_element(u.begin(), u.end());
    double scale = (lap_norm + max_abs(p.alpha)) * umax;
    if (umin > 0.0) scale += max_abs(p.beta) / umin;
    tol = std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * scale);
  }
  int stalled = 0;
  for (int it = 0; it < max_steps && res > tol; ++it) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(jacobian(p, u));
    if (lu.info() != Eigen::Success) break;
    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXd du = lu.solve(fv);
    if (lu.info() != Eigen::Success || !du.allFinite()) break;

    double tau = 1.0;
    std::vector<double> trial(u.size());
    bool accepted = false;
    while (tau >= 1.0 / 1024.0) {
      bool positive = true;
      for (std::size_t i = 0; i < u.size(); ++i) {
        trial[i] = u[i] - tau * du(static_cast<Eigen::Index>(i));
        if (!(trial[i] > floor)) positive = false;
      }
      if (positive) {
        const auto ft = p.residual(trial);
        const double rt = max_abs(ft);
        if (rt < res || tau == 1.0 / 1024.0) {
          accepted = true;
          if (rt >= 0.999 * res) ++stalled;
          u = trial;
          f = ft;
          res = rt;
          break;
        }
      }
      tau *= 0.5;
    }
    ++out.steps;
    if (!accepted) {
      out.floor_hit = true;
      break;
    }
    if (stalled >= 3) break;
  }
  out.u = std::move(u);
  out.residual = res;
  out.converged = res <= tol;
  return out;
}

SubmanifoldModel stencil_twin(const SubmanifoldModel& m) {
  return {m.kind(), m.lengths(), m.counts(), m.N(), LaplacianScheme::Stencil};
}

std::vector<double> dense_spectrum(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  YAMABE_REQUIRE(es.info() == Eigen::Success, ErrorKind::SpectralFailure, "linearized spectrum failed");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

void finish(const SingularProblem& p, SingularSolution& s) {
  const auto eigs = linearized_spectrum(p, s.u);
  s.linearized_eigs.assign(eigs.begin(), eigs.begin() + std::min<std::size_t>(6, eigs.size()));
  s.min_abs_eig = std::abs(eigs.front());
  for (double e : eigs) s.min_abs_eig = std::min(s.min_abs_eig, std::abs(e));
  s.nondegenerate = s.min_abs_eig > 1e-8;
}

}  // namespace

SingularProblem::SingularProblem(const SubmanifoldModel& m, std::vector<double> a, std::vector<double> b,
                                 Singularity s)
    : model(&m), alpha(std::move(a)), beta(std::move(b)), sign(s) {
  YAMABE_REQUIRE(alpha.size() == m.size() && beta.size() == m.size(), ErrorKind::InvalidArgument,
                 "SingularProblem: coefficient size mismatch");
  for (std::size_t i = 0; i < alpha.size(); ++i)
    YAMABE_REQUIRE(std::isfinite(alpha[i]) && std::isfinite(beta[i]), ErrorKind::InvalidField,
                   "SingularProblem: non-finite coefficient");
  YAMABE_REQUIRE(*std::min_element(beta.begin(), beta.end()) > 0.0, ErrorKind::Precondition,
                 "SingularProblem: beta must be positive");
  if (sign == Singularity::Attractive)
    YAMABE_REQUIRE(*std::min_element(alpha.begin(), alpha.end()) > 0.0, ErrorKind::Precondition,
                   "SingularProblem: attractive problem needs min alpha > 0");
}

bool SingularProblem::constant_coefficients() const {
  return std::all_of(alpha.begin(), alpha.end(), [&](double a) { return a == alpha.front(); }) &&
         std::all_of(beta.begin(), beta.end(), [&](double b) { return b == beta.front(); });
}

std::vector<double> SingularProblem::residual(const std::vector<double>& u) const {
  auto out = model->apply_laplacian(u);
  const double s = sign == Singularity::Attractive ? -1.0 : 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -out[i] + alpha[i] * u[i] + s * beta[i] / u[i];
  return out;
}

double SingularProblem::integral_identity(const std::vector<double>& u) const {
  const double s = sign == Singularity::Attractive ? -1.0 : 1.0;
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = alpha[i] * u[i] + s * beta[i] / u[i];
  return model->integrate(g);
}

Bracket bracket_constants(const SingularProblem& p) {
  YAMABE_REQUIRE(p.sign == Singularity::Attractive, ErrorKind::Precondition,
                 "bracket_constants: attractive problems only");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < p.alpha.size(); ++i) {
    const double r = std::sqrt(p.beta[i] / p.alpha[i]);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {0.5 * lo, 2.0 * hi};
}

std::vector<double> linearized_spectrum(const SingularProblem& p, const std::vector<double>& u) {
  Eigen::MatrixXd a = -p.model->laplacian_dense();
  const double s = p.sign == Singularity::Attractive ? 1.0 : -1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, ii) += p.alpha[i] + s * p.beta[i] / (u[i] * u[i]);
  }
  return dense_spectrum(a);
}

SingularSolution solve_attractive(const SingularProblem& p, double tol) {
  YAMABE_REQUIRE(p.sign == Singularity::Attractive, ErrorKind::Precondition, "solve_attractive: wrong sign");
  YAMABE_REQUIRE(tol > 0.0, ErrorKind::InvalidArgument, "solve_attractive: tol must be positive");
  const Bracket br = bracket_constants(p);
  const std::size_t n = p.model->size();

  // (-Δ + α + K) u_{n+1} = β/u_n + K u_n with K >= max β/c² makes the right
  // side increasing in u on [c, C], so the iterates decrease from C. The
  // stencil Laplacian is an M-matrix; the Fourier one is not.
  double shift = 0.0;
  for (double b : p.beta) shift = std::max(shift, b / (br.lower * br.lower));
  const SubmanifoldModel twin = stencil_twin(*p.model);
  Eigen::SparseMatrix<double> op = -twin.laplacian();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    op.coeffRef(ii, ii) += p.alpha[i] + shift;
  }
  op.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(op);
  YAMABE_REQUIRE(lu.info() == Eigen::Success, ErrorKind::SolverFailure, "solve_attractive: factorization failed");

  SingularSolution out;
  std::vector<double> u(n, br.upper);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  const double slack = 1e-14 * br.upper;
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = p.beta[i] / u[i] + shift * u[i];
    const Eigen::VectorXd next = lu.solve(rhs);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = next(static_cast<Eigen::Index>(i));
      if (!(v > 0.0)) throw Error(ErrorKind::PositivityViolation, "solve_attractive: non-positive iterate");
      if (v < br.lower - slack || v > br.upper + slack)
        throw Error(ErrorKind::SolverFailure, "solve_attractive: iterate left the bracket");
      if (v > u[i] + 1e-14 * std::max(1.0, u[i])) out.monotone = false;
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    ++out.monotone_steps;
    if (change <= 1e-8 * br.upper) break;
  }

  const auto polished = newton(p, u, tol, 1e-8 * br.lower);
  if (polished.floor_hit) throw Error(ErrorKind::PositivityViolation, "solve_attractive: Newton hit the floor");
  if (!polished.converged) throw Error(ErrorKind::SolverFailure, "solve_attractive: Newton did not converge");
  out.u = polished.u;
  out.newton_steps = polished.steps;
  out.residual_norm = polished.residual;
  for (double v : out.u)
    if (v < br.lower - slack || v > br.upper + slack)
      throw Error(ErrorKind::SolverFailure, "solve_attractive: solution left the bracket");
  finish(p, out);
  return out;
}

std::vector<double> certify_attractive_nondegeneracy(const SingularProblem& p, const std::vector<double>& u,
                                                     int count) {
  YAMABE_REQUIRE(p.sign == Singularity::Attractive, ErrorKind::Precondition,
                 "certify_attractive_nondegeneracy: wrong sign");
  auto eigs = linearized_spectrum(p, u);
  eigs.resize(std::min<std::size_t>(eigs.size(), static_cast<std::size_t>(count)));
  if (!(eigs.front() > 0.0))
    throw Error(ErrorKind::Degeneracy, "certify_attractive_nondegeneracy: non-positive eigenvalue");
  return eigs;
}

Feasibility repulsive_feasibility(const SingularProblem& p) {
  Feasibility f;
  f.min_alpha = *std::min_element(p.alpha.begin(), p.alpha.end());
  f.feasible = f.min_alpha < 0.0;
  if (!f.feasible) f.reason = "min alpha >= 0";
  return f;
}

bool window_check(double length, double alpha_max, int kappa) {
  YAMABE_REQUIRE(kappa >= 1 && length > 0.0, ErrorKind::InvalidArgument, "window_check: need kappa >= 1, length > 0");
  const double lo = -std::pow((kappa + 1) * std::numbers::pi / (2.0 * length), 2);
  const double hi = -std::pow(kappa * std::numbers::pi / (2.0 * length), 2);
  return lo < alpha_max && alpha_max < hi && hi < 0.0;
}

bool spectral_window(const SubmanifoldModel& model, double a) {
  if (!(a < 0.0)) return false;
  const auto lambdas = distinct_positive_eigenvalues(model, static_cast<int>(model.size()));
  double below = 0.0;
  for (double l : lambdas) {
    if (-l < 2.0 * a && 2.0 * a < -below) return true;
    below = l;
  }
  return false;
}

SingularSolution solve_repulsive(const SingularProblem& p, double tol, const std::optional<std::vector<double>>& seed) {
  YAMABE_REQUIRE(p.sign == Singularity::Repulsive, ErrorKind::Precondition, "solve_repulsive: wrong sign");
  YAMABE_REQUIRE(tol > 0.0, ErrorKind::InvalidArgument, "solve_repulsive: tol must be positive");
  const auto feas = repulsive_feasibility(p);
  if (!feas.feasible) throw Error(ErrorKind::Precondition, "solve_repulsive: " + feas.reason);
  const std::size_t n = p.model->size();

  auto fail = [](const NewtonResult& r) {
    throw Error(ErrorKind::NoSolutionFound, r.floor_hit ? "solve_repulsive: positivity floor hit"
                                                        : "solve_repulsive: Newton stagnated");
  };

  SingularSolution out;
  if (seed || p.constant_coefficients()) {
    std::vector<double> u0;
    if (seed) {
      YAMABE_REQUIRE(seed->size() == n, ErrorKind::InvalidArgument, "solve_repulsive: seed size mismatch");
      u0 = *seed;
    } else {
      YAMABE_REQUIRE(p.alpha.front() < 0.0, ErrorKind::Precondition, "solve_repulsive: constant alpha must be < 0");
      u0.assign(n, std::sqrt(-p.beta.front() / p.alpha.front()));
    }
    const double floor = 1e-8 * *std::min_element(u0.begin(), u0.end());
    YAMABE_REQUIRE(floor > 0.0, ErrorKind::InvalidArgument, "solve_repulsive: seed must be positive");
    const auto r = newton(p, u0, tol, floor);
    if (!r.converged) fail(r);
    out.u = r.u;
    out.newton_steps = r.steps;
    out.residual_norm = r.residual;
  } else {
    const double abar = mean(*p.model, p.alpha);
    const double bbar = mean(*p.model, p.beta);
    YAMABE_REQUIRE(abar < 0.0, ErrorKind::NoSolutionFound,
                   "solve_repulsive: averaged alpha is not negative, no constant start");
    std::vector<double> u(n, std::sqrt(-bbar / abar));
    const double floor = 1e-8 * u.front();
    double t = 0.0;
    double dt = 0.1;
    while (t < 1.0) {
      const double tn = std::min(1.0, t + dt);
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = (1.0 - tn) * abar + tn * p.alpha[i];
        b[i] = (1.0 - tn) * bbar + tn * p.beta[i];
      }
      const SingularProblem step(*p.model, a, b, Singularity::Repulsive);
      const auto r = newton(step, u, tn == 1.0 ? tol : std::max(tol, 1e-10), floor);
      out.newton_steps += r.steps;
      if (r.converged) {
        u = r.u;
        t = tn;
        out.residual_norm = r.residual;
      } else {
        dt *= 0.5;
        if (dt < 1e-4) fail(r);
      }
    }
    out.u = std::move(u);
  }
  finish(p, out);
  return out;
}

}  // namespace yamabe
