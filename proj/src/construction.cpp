// SPDX-License-Identifier: Apache-2.0
#include "yamabe/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "yamabe/bubble.hpp"
#include "yamabe/error.hpp"
#include "yamabe/radial_operator.hpp"
#include "yamabe/sphere_rule.hpp"

namespace yamabe {

namespace {

struct SymSplit {
  Eigen::MatrixXd traceless;
  double trace = 0.0;
};

SymSplit split(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
  const double tr = s.trace();
  return {s - (tr / static_cast<double>(s.rows())) * Eigen::MatrixXd::Identity(s.rows(), s.cols()), tr};
}

// Three-point derivatives on a non-uniform grid at interior node i.
struct Deriv {
  double d1 = 0.0, d2 = 0.0;
};

Deriv fd(const RadialGrid& g, const std::vector<double>& f, std::size_t i) {
  const double h1 = g[i] - g[i - 1];
  const double h2 = g[i + 1] - g[i];
  Deriv d;
  d.d1 = (-h2 / (h1 * (h1 + h2))) * f[i - 1] + ((h2 - h1) / (h1 * h2)) * f[i] + (h1 / (h2 * (h1 + h2))) * f[i + 1];
  d.d2 = 2.0 * (f[i - 1] / (h1 * (h1 + h2)) - f[i] / (h1 * h2) + f[i + 1] / (h2 * (h1 + h2)));
  return d;
}

std::pair<double, double> eig_range(const Eigen::MatrixXd& q) {
  if (q.size() == 0) return {0.0, 0.0};
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double quad_form(const Eigen::MatrixXd& a, const std::vector<double>& t) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += t[i] * a(i, j) * t[j];
  return s;
}

std::vector<double> field_or_zero(const std::vector<double>& v, std::size_t n) {
  return v.empty() ? std::vector<double>(n, 0.0) : v;
}

struct NodeGeometry {
  Eigen::MatrixXd S, M, S0, M0;
  double trS = 0.0, trM = 0.0;
};

NodeGeometry node_geometry(const SubmanifoldModel& model, std::size_t node) {
  NodeGeometry g;
  g.S = normal_trace_matrix(model, node);
  g.M = first_order_matrix(model, node);
  const auto s = split(g.S);
  const auto m = split(g.M);
  g.S0 = s.traceless;
  g.trS = s.trace;
  g.M0 = m.traceless;
  g.trM = m.trace;
  return g;
}

ModeProfile h1_profile(const SubmanifoldModel& model, std::size_t node, const RadialGrid& grid, Regime regime,
                       double mu, double lap_mu, double grad_sq) {
  const int N = model.N();
  const BubbleFamily b(N);
  const auto geo = node_geometry(model, node);
  const double s = regime_sign(regime);
  const double hn = model.h.empty() ? 0.0 : model.h[node];
  const double trace_part = (geo.trS / 3.0 - geo.trM) / N;
  ModeProfile out;
  out.m0.resize(grid.size());
  out.m2.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double w = b.w0(r), dw = b.dw0(r), d2w = b.d2w0(r);
    const double t1 = r * r * d2w + 2.0 * (1.0 + b.gamma) * r * dw + b.gamma * (1.0 + b.gamma) * w;
    out.m0[i] = mu * lap_mu * b.z0(r) - grad_sq * t1 + mu * mu * r * dw * trace_part + mu * mu * hn * w -
                s * b.w0p_ln_w0(r);
    out.m2[i] = mu * mu * r * dw;
  }
  out.Q = geo.S0 / 3.0 - geo.M0;
  return out;
}

}  // namespace

// ---------------------------------------------------------------- norms

void WeightedNormSpec::validate(int N) const {
  YAMABE_REQUIRE(sigma > 0.0 && sigma < 1.0, ErrorKind::InvalidArgument, "WeightedNormSpec: sigma must be in (0,1)");
  YAMABE_REQUIRE(eps > 0.0 && eps < 1.0, ErrorKind::InvalidArgument, "WeightedNormSpec: eps must be in (0,1)");
  YAMABE_REQUIRE(r == std::floor(r) && r > 4.0 && r < N, ErrorKind::InvalidArgument,
                 "WeightedNormSpec: r must be an integer with 4 < r < N");
}

double ModeProfile::value(std::size_t i, const std::vector<double>& theta) const {
  double v = m0.empty() ? 0.0 : m0[i];
  if (!m2.empty()) v += m2[i] * quad_form(Q, theta);
  for (std::size_t j = 0; j < m1.size(); ++j) v += m1[j][i] * theta[j];
  return v;
}

double ModeProfile::sup_abs(std::size_t i) const {
  const auto [lo, hi] = eig_range(m2.empty() ? Eigen::MatrixXd() : Q);
  const double a = m0.empty() ? 0.0 : m0[i];
  const double c = m2.empty() ? 0.0 : m2[i];
  double best = std::max(std::abs(a + c * lo), std::abs(a + c * hi));
  if (!m1.empty()) {
    double n1 = 0.0;
    for (const auto& p : m1) n1 += p[i] * p[i];
    // Not exact once mode 1 is mixed in; this is the triangle-inequality bound.
    best += std::sqrt(n1);
  }
  return best;
}

bool ModeField::all_finite() const {
  for (const auto& n : nodes) {
    for (double v : n.m0)
      if (!std::isfinite(v)) return false;
    for (double v : n.m2)
      if (!std::isfinite(v)) return false;
    for (const auto& p : n.m1)
      for (double v : p)
        if (!std::isfinite(v)) return false;
  }
  return true;
}

double weighted_norm(const RadialField& w, double r) {
  double best = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w.grid[i];
    best = std::max(best, std::pow(1.0 + x * x, 0.5 * r) * std::abs(w[i]));
  }
  return best;
}

double weighted_norm(const RadialField& w, const WeightedNormSpec& spec) { return weighted_norm(w, spec.r); }

double weighted_norm(const ModeField& w, double r) {
  double best = 0.0;
  for (const auto& node : w.nodes) {
    const auto [lo, hi] = eig_range(node.m2.empty() ? Eigen::MatrixXd() : node.Q);
    for (std::size_t i = 0; i < w.grid.size(); ++i) {
      const double a = node.m0.empty() ? 0.0 : node.m0[i];
      const double c = node.m2.empty() ? 0.0 : node.m2[i];
      double v = std::max(std::abs(a + c * lo), std::abs(a + c * hi));
      if (!node.m1.empty()) {
        double n1 = 0.0;
        for (const auto& p : node.m1) n1 += p[i] * p[i];
        v += std::sqrt(n1);
      }
      const double x = w.grid[i];
      best = std::max(best, std::pow(1.0 + x * x, 0.5 * r) * v);
    }
  }
  return best;
}

double weighted_norm(const ModeField& w, const WeightedNormSpec& spec) { return weighted_norm(w, spec.r); }

double weighted_holder_norm(const RadialField& w, const WeightedNormSpec& spec) {
  YAMABE_REQUIRE(spec.sigma > 0.0 && spec.sigma < 1.0, ErrorKind::InvalidArgument,
                 "weighted_holder_norm: sigma must be in (0,1)");
  double semi = 0.0;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n && w.grid[j] - w.grid[i] <= 1.0; ++j) {
      const double rc = 0.5 * (w.grid[i] + w.grid[j]);
      const double q = std::abs(w[j] - w[i]) / std::pow(w.grid[j] - w.grid[i], spec.sigma);
      semi = std::max(semi, std::pow(1.0 + rc * rc, 0.5 * (spec.r + spec.sigma)) * q);
    }
  return weighted_norm(w, spec.r) + semi;
}

// ---------------------------------------------------------------- T terms, μ0, H1

TTerms assemble_T_terms(const SubmanifoldModel& model, std::size_t node, const RadialGrid& grid) {
  const int N = model.N();
  const BubbleFamily b(N);
  const auto geo = node_geometry(model, node);
  TTerms t;
  std::vector<double> t1(grid.size());
  t.T2.m0.resize(grid.size());
  t.T2.m2.resize(grid.size());
  t.T3.m0.resize(grid.size());
  t.T3.m2.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double w = b.w0(r), dw = b.dw0(r), d2w = b.d2w0(r);
    t1[i] = r * r * d2w + 2.0 * (1.0 + b.gamma) * r * dw + b.gamma * (1.0 + b.gamma) * w;
    t.T2.m0[i] = r * dw * geo.trS / (3.0 * N);
    t.T2.m2[i] = r * dw / 3.0;
    t.T3.m0[i] = r * dw * geo.trM / N;
    t.T3.m2[i] = r * dw;
  }
  t.T1 = RadialField(grid, std::move(t1));
  t.T2.Q = geo.S0;
  t.T3.Q = geo.M0;
  return t;
}

Mu0Result solve_mu0(const SubmanifoldModel& model, Regime regime, const ProjectionConstants& c, int omega_sign,
                    double tol) {
  YAMABE_REQUIRE(c.N == model.N(), ErrorKind::InvalidArgument, "solve_mu0: constants computed for another N");
  const std::size_t n = model.size();
  const auto omega = omega_field(model, omega_sign);
  Mu0Result out;
  out.H.resize(n);
  std::vector<double> alpha(n), beta(n, c.ratio_b());
  for (std::size_t i = 0; i < n; ++i) {
    out.H[i] = (model.h.empty() ? 0.0 : model.h[i]) - omega[i];
    alpha[i] = c.ratio_a() * out.H[i];
  }
  if (regime == Regime::Subcritical) {
    for (double v : out.H)
      YAMABE_REQUIRE(v > 0.0, ErrorKind::Precondition, "solve_mu0: subcritical regime needs H = h - Omega > 0");
    const SingularProblem p(model, alpha, beta, Singularity::Attractive);
    out.solution = solve_attractive(p, tol);
  } else {
    for (double v : out.H)
      YAMABE_REQUIRE(v < 0.0, ErrorKind::Precondition, "solve_mu0: supercritical regime needs H = h - Omega < 0");
    const SingularProblem p(model, alpha, beta, Singularity::Repulsive);
    out.solution = solve_repulsive(p, tol);
  }
  out.mu0 = out.solution.u;
  return out;
}

ModeProfile assemble_H1(const SubmanifoldModel& model, const std::vector<double>& mu0, std::size_t node,
                        const RadialGrid& grid, Regime regime) {
  YAMABE_REQUIRE(mu0.size() == model.size() && node < model.size(), ErrorKind::InvalidArgument,
                 "assemble_H1: size mismatch");
  const auto lap = model.apply_laplacian(mu0);
  const auto grad = model.gradient_sq(mu0);
  return h1_profile(model, node, grid, regime, mu0[node], lap[node], grad[node]);
}

double evaluate_H1_direct(const SubmanifoldModel& model, const std::vector<double>& mu0, std::size_t node, double r,
                          const std::vector<double>& theta, Regime regime) {
  const int N = model.N();
  const int k = model.k();
  const BubbleFamily b(N);
  const auto& cd = model.curvature;
  const double mu = mu0[node];
  const double lap = model.apply_laplacian(mu0)[node];
  const double grad = model.gradient_sq(mu0)[node];
  const double w = b.w0(r), dw = b.dw0(r), d2w = b.d2w0(r);

  // Hessian of w0 at ξ = rθ.
  Eigen::MatrixXd hess(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double tt = theta[i] * theta[j];
      hess(i, j) = r > 0.0 ? d2w * tt + (dw / r) * ((i == j ? 1.0 : 0.0) - tt) : (i == j ? d2w : 0.0);
    }
  std::vector<double> xi(N);
  for (int i = 0; i < N; ++i) xi[i] = r * theta[i];

  double t2 = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double coeff = 0.0;
      for (int m = 0; m < N; ++m)
        for (int l = 0; l < N; ++l) coeff += cd.normal(node, m, i, j, l) * xi[m] * xi[l];
      t2 += coeff * hess(i, j);
    }
  t2 /= 3.0;

  const Eigen::MatrixXd ginv = cd.g_inverse(node);
  double t3 = 0.0;
  for (int m = 0; m < N; ++m)
    for (int j = 0; j < N; ++j) {
      double coeff = 0.0;
      for (int s = 0; s < N; ++s) coeff += 2.0 / 3.0 * cd.normal(node, m, s, s, j);
      for (int a = 0; a < k; ++a)
        for (int bb = 0; bb < k; ++bb)
          coeff += ginv(a, bb) * cd.mixed(node, m, a, bb, j) - cd.gamma(node, a, bb, m) * cd.gamma(node, bb, a, j);
      t3 += coeff * xi[m] * dw * theta[j];
    }

  const double t1 = r * r * d2w + 2.0 * (1.0 + b.gamma) * r * dw + b.gamma * (1.0 + b.gamma) * w;
  const double hn = model.h.empty() ? 0.0 : model.h[node];
  return mu * lap * b.z0(r) - grad * t1 + mu * mu * (t2 - t3) + mu * mu * hn * w -
         regime_sign(regime) * b.w0p_ln_w0(r);
}

// ---------------------------------------------------------------- linear solve

namespace {

struct ModeSolve {
  std::vector<double> phi;
  double constraint = 0.0;
};

ModeSolve solve_mode(int mode, int N, const RadialField& pot, const std::vector<double>& h,
                     const std::vector<double>* Z, double orth_rel, double orth_abs) {
  const RadialGrid& grid = pot.grid;
  const RadialOperator op(mode, N, pot);
  const std::size_t m = op.unknowns();
  const auto tw = grid.trapezoid_weights(N);

  auto inner = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += tw[i] * a[i] * b[i];
    return s;
  };
  if (Z) {
    const double ip = inner(h, *Z);
    const double bound = orth_rel * std::sqrt(inner(h, h) * inner(*Z, *Z)) + orth_abs;
    if (std::abs(ip) > bound)
      throw Error(ErrorKind::Precondition, "linear_solve: right-hand side is not orthogonal to the kernel");
  }

  // Rows of K scale like r^{d-1}, which is tiny near the origin; solve the
  // symmetrically scaled system in y = V^{1/2} ψ instead.
  const auto hr = op.reduce(h);
  const auto sym = op.symmetric_form();
  const auto& vol = op.volumes();
  const std::size_t dimn = m + (Z ? 1 : 0);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    t.emplace_back(ii, ii, sym.diag[i]);
    if (i + 1 < m) {
      t.emplace_back(ii, ii + 1, sym.off[i]);
      t.emplace_back(ii + 1, ii, sym.off[i]);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimn));
  for (std::size_t i = 0; i < m; ++i) rhs(static_cast<Eigen::Index>(i)) = std::sqrt(vol[i]) * hr[i];
  if (Z) {
    std::vector<double> c(m);
    double cmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      c[i] = tw[i] * std::pow(grid[i], mode) * (*Z)[i] / std::sqrt(vol[i]);
      cmax = std::max(cmax, std::abs(c[i]));
    }
    const auto last = static_cast<Eigen::Index>(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (c[i] == 0.0) continue;
      t.emplace_back(static_cast<Eigen::Index>(i), last, c[i] / cmax);
      t.emplace_back(last, static_cast<Eigen::Index>(i), c[i] / cmax);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(dimn), static_cast<Eigen::Index>(dimn));
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "linear_solve: singular constrained system");
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::SolverFailure, "linear_solve: constrained solve failed");

  std::vector<double> psi(grid.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) psi[i] = x(static_cast<Eigen::Index>(i)) / std::sqrt(vol[i]);
  ModeSolve out;
  out.phi = op.expand(psi);
  if (Z) {
    const double pp = inner(out.phi, out.phi);
    out.constraint = pp > 0.0 ? std::abs(inner(out.phi, *Z)) / std::sqrt(pp * inner(*Z, *Z)) : 0.0;
  }
  return out;
}

}  // namespace

LinearSolveResult linear_solve(const std::vector<double>& a, const ModeField& h, const LinearSolveOptions& opt) {
  const int N = h.N;
  opt.spec.validate(N);
  YAMABE_REQUIRE(a.size() == h.nodes.size(), ErrorKind::InvalidArgument, "linear_solve: size mismatch");
  YAMABE_REQUIRE(opt.orth_abs.empty() || opt.orth_abs.size() == a.size(), ErrorKind::InvalidArgument,
                 "linear_solve: orth_abs size mismatch");
  for (double v : a) YAMABE_REQUIRE(v > 0.0, ErrorKind::Precondition, "linear_solve: a must be positive");
  YAMABE_REQUIRE(h.all_finite(), ErrorKind::InvalidField, "linear_solve: non-finite right-hand side");

  const BubbleFamily b(N);
  const RadialGrid& grid = h.grid;
  const auto base = RadialField::sample(grid, [&](double r) { return -b.p * b.w0_pow(r, b.p - 1.0); });
  const auto z0 = RadialField::sample(grid, [&](double r) { return b.z0(r); }).values;
  const auto zr = RadialField::sample(grid, [&](double r) { return b.dw0(r); }).values;

  LinearSolveResult out;
  out.phi.grid = grid;
  out.phi.N = N;
  out.phi.nodes.resize(h.nodes.size());
  std::vector<double> constraint(h.nodes.size(), 0.0);

  for_each_index(h.nodes.size(), opt.exec, [&](std::size_t n) {
    auto pot = base;
    for (double& v : pot.values) v += opt.spec.eps * a[n];
    const double abs_tol = opt.orth_abs.empty() ? 0.0 : opt.orth_abs[n];
    const auto& src = h.nodes[n];
    auto& dst = out.phi.nodes[n];
    double worst = 0.0;
    if (!src.m0.empty()) {
      auto s = solve_mode(0, N, pot, src.m0, &z0, opt.orth_rel, abs_tol);
      dst.m0 = std::move(s.phi);
      worst = std::max(worst, s.constraint);
    }
    if (!src.m2.empty()) {
      dst.m2 = solve_mode(2, N, pot, src.m2, nullptr, 0.0, 0.0).phi;
      dst.Q = src.Q;
    }
    for (const auto& comp : src.m1) {
      auto s = solve_mode(1, N, pot, comp, &zr, opt.orth_rel, abs_tol);
      dst.m1.push_back(std::move(s.phi));
      worst = std::max(worst, s.constraint);
    }
    constraint[n] = worst;
  });

  for (double c : constraint) out.constraint_residual = std::max(out.constraint_residual, c);
  const double hn = weighted_norm(h, opt.spec.r);
  out.norm_ratio = hn > 0.0 ? weighted_norm(out.phi, opt.spec.r - 2.0) / hn : 0.0;
  return out;
}

// ---------------------------------------------------------------- μ1, Φ1, α_ε

std::vector<double> solve_mu1(const SubmanifoldModel& model, const std::vector<double>& mu0, Regime regime,
                              const ProjectionConstants& c, int omega_sign) {
  const std::size_t n = model.size();
  YAMABE_REQUIRE(mu0.size() == n, ErrorKind::InvalidArgument, "solve_mu1: size mismatch");
  const auto omega = omega_field(model, omega_sign);
  const double sigma = -regime_sign(regime);
  const int N = model.N();
  const double beta = c.ratio_b();

  Eigen::SparseMatrix<double> op = -model.laplacian();
  Eigen::MatrixXd dense = -model.laplacian_dense();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double alpha = c.ratio_a() * ((model.h.empty() ? 0.0 : model.h[i]) - omega[i]);
    const double d = alpha + sigma * beta / (mu0[i] * mu0[i]);
    op.coeffRef(ii, ii) += d;
    dense(ii, ii) += d;
    rhs(ii) = sigma * (N - 2.0) * (N - 2.0) * beta / (16.0 * mu0[i]);
  }
  op.makeCompressed();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dense + dense.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().cwiseAbs().minCoeff() <= 1e-8)
    throw Error(ErrorKind::Degeneracy, "solve_mu1: linearization at mu0 is singular");
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(op);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::Degeneracy, "solve_mu1: factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_phi1(const SubmanifoldModel& model, const std::vector<double>& G) {
  const std::size_t dimn = model.size() * static_cast<std::size_t>(model.N());
  YAMABE_REQUIRE(G.size() == dimn, ErrorKind::InvalidArgument, "solve_phi1: G must have size nodes*N");
  if (jacobi_nondegeneracy(model).degenerate)
    throw Error(ErrorKind::Precondition, "solve_phi1: Jacobi operator is degenerate");
  const auto j = jacobi_operator(model);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(j);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "solve_phi1: factorization failed");
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(dimn));
  for (std::size_t i = 0; i < dimn; ++i) rhs(static_cast<Eigen::Index>(i)) = -G[i];
  const Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

double alpha_eps(double eps, int N, Regime regime) {
  YAMABE_REQUIRE(eps > 0.0 && eps < 1.0, ErrorKind::InvalidArgument, "alpha_eps: eps must be in (0,1)");
  const double s = regime_sign(regime);
  const double n2 = N - 2.0;
  const double a = std::expm1(s * n2 * n2 * eps * std::log(eps) / (16.0 + 4.0 * s * n2 * eps));
  YAMABE_REQUIRE(std::abs(a) < 0.5, ErrorKind::Domain, "alpha_eps: |alpha_eps| >= 0.5, eps too large");
  return a;
}

double alpha_eps_identity(double alpha, double eps, int N, Regime regime) {
  const double s = regime_sign(regime);
  const double p = (N + 2.0) / (N - 2.0);
  return std::exp((p - 1.0 + s * eps) * std::log1p(alpha) - s * (N - 2.0) * eps * std::log(eps) / 4.0);
}

// ---------------------------------------------------------------- state and residual

ConstructionState build_state(const SubmanifoldModel& model, double eps, Version version,
                              const ProjectionConstants& c, const ConstructionOptions& opt) {
  YAMABE_REQUIRE(eps > 0.0 && eps < 1.0, ErrorKind::InvalidArgument, "build_state: eps must be in (0,1)");
  YAMABE_REQUIRE(opt.eta > 0.0, ErrorKind::InvalidArgument, "build_state: eta must be positive");
  const int N = model.N();
  const std::size_t n = model.size();
  ConstructionState st;
  st.eps = eps;
  st.N = N;
  st.regime = opt.regime;
  st.constants = c;
  const auto mu = solve_mu0(model, opt.regime, c, opt.omega_sign);
  st.mu0 = mu.mu0;
  st.H = mu.H;
  st.alpha_eps = alpha_eps(eps, N, opt.regime);
  st.grid = RadialGrid(opt.eta / std::sqrt(eps), opt.intervals, opt.grading);

  const auto lap = model.apply_laplacian(st.mu0);
  const auto grad = model.gradient_sq(st.mu0);
  st.H1.grid = st.grid;
  st.H1.N = N;
  st.H1.nodes.resize(n);
  for_each_index(n, opt.exec, [&](std::size_t i) {
    st.H1.nodes[i] = h1_profile(model, i, st.grid, opt.regime, st.mu0[i], lap[i], grad[i]);
  });

  if (version == Version::V1) {
    // The Z0 projection of H1 vanishes over all of R^N; on the truncated
    // ball it is off by the tail, which is what the solve must tolerate.
    const RadialGrid big = default_constants_grid();
    const BubbleFamily b(N);
    const auto z_small = RadialField::sample(st.grid, [&](double r) { return b.z0(r); });
    const auto z_big = RadialField::sample(big, [&](double r) { return b.z0(r); });
    const double c1_radial = radial_inner(z_big, z_big, N) / sphere_area(N);
    std::vector<double> allowance(n);
    for_each_index(n, opt.exec, [&](std::size_t i) {
      const auto hb = h1_profile(model, i, big, opt.regime, st.mu0[i], lap[i], grad[i]);
      const double p_big = radial_inner(RadialField(big, hb.m0), z_big, N) / sphere_area(N);
      const double p_small = radial_inner(RadialField(st.grid, st.H1.nodes[i].m0), z_small, N) / sphere_area(N);
      allowance[i] = eps * (std::abs(p_small - p_big) + 1e-8 * c1_radial);
    });

    ModeField rhs = st.H1;
    for (auto& node : rhs.nodes) {
      for (double& v : node.m0) v *= -eps;
      for (double& v : node.m2) v *= -eps;
    }
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = st.mu0[i] * st.mu0[i] * (model.h.empty() ? 0.0 : model.h[i]);
    LinearSolveOptions lo;
    lo.spec = {static_cast<double>(opt.r_weight), 0.5, eps};
    lo.orth_abs = allowance;
    lo.exec = opt.exec;
    auto sol = linear_solve(a, rhs, lo);
    st.w1 = std::move(sol.phi);
    st.w1_norm_ratio = sol.norm_ratio;
    st.w1_constraint_residual = sol.constraint_residual;
  }

  st.mu1 = solve_mu1(model, st.mu0, opt.regime, c, opt.omega_sign);
  try {
    st.Phi1 = solve_phi1(model, std::vector<double>(n * N, 0.0));
    st.phi1_solved = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Precondition) throw;
    st.Phi1.assign(n * N, 0.0);
    st.phi1_note = "Jacobi operator degenerate; Phi1 set to zero and not used at this order";
  }
  return st;
}

ResidualResult residual(const ConstructionState& st, const SubmanifoldModel& model, Version version,
                        Execution exec) {
  if (version == Version::V1 && !st.w1)
    throw Error(ErrorKind::State, "residual: v1 requested but w1 was not solved");
  const int N = st.N;
  const int k = model.k();
  const std::size_t n = model.size();
  const RadialGrid& grid = st.grid;
  const std::size_t M = grid.size() - 1;
  const BubbleFamily b(N);
  const double eps = st.eps;
  const double s = regime_sign(st.regime);
  const double F = alpha_eps_identity(st.alpha_eps, eps, N, st.regime);
  const double q = b.p + s * eps;
  const double sqrt_eps = std::sqrt(eps);
  const bool with_w1 = version == Version::V1;

  const auto lap_mu = model.apply_laplacian(st.mu0);
  const auto grad_sq = model.gradient_sq(st.mu0);
  std::vector<std::vector<double>> dmu(k);
  for (int a = 0; a < k; ++a) dmu[a] = model.derivative(st.mu0, a);

  // Directions: one of each antipodal pair of the degree-5 rule, plus the
  // eigenvectors of each node's Q (all terms are even in θ).
  const auto rule = sphere_rule(N);
  std::vector<std::vector<double>> base_dirs;
  for (std::size_t d = 0; d < rule.points.size(); ++d) {
    const auto& x = rule.points[d];
    const auto first = std::find_if(x.begin(), x.end(), [](double v) { return v != 0.0; });
    if (*first > 0.0) base_dirs.push_back(x);
  }

  // Radial derivatives of the w1 profiles.
  struct Profiles {
    std::vector<double> f0, f0d, f0dd, f2, f2d, f2dd;
  };
  std::vector<Profiles> prof(with_w1 ? n : 0);
  if (with_w1) {
    for_each_index(n, exec, [&](std::size_t m) {
      const auto& node = st.w1->nodes[m];
      auto& p = prof[m];
      p.f0 = field_or_zero(node.m0, grid.size());
      p.f2 = field_or_zero(node.m2, grid.size());
      p.f0d.assign(grid.size(), 0.0);
      p.f0dd.assign(grid.size(), 0.0);
      p.f2d.assign(grid.size(), 0.0);
      p.f2dd.assign(grid.size(), 0.0);
      for (std::size_t i = 1; i < M; ++i) {
        const auto d0 = fd(grid, p.f0, i);
        const auto d2 = fd(grid, p.f2, i);
        p.f0d[i] = d0.d1;
        p.f0dd[i] = d0.d2;
        p.f2d[i] = d2.d1;
        p.f2dd[i] = d2.d2;
      }
    });
  }
  auto Qof = [&](std::size_t m) -> const Eigen::MatrixXd& { return st.w1->nodes[m].Q; };
  auto Yof = [&](std::size_t m, const std::vector<double>& th) {
    return (with_w1 && st.w1->nodes[m].Q.size() > 0) ? quad_form(Qof(m), th) : 0.0;
  };

  ResidualResult out;
  out.per_node.assign(n, 0.0);
  std::vector<std::size_t> ndirs(n, 0);

  for_each_index(n, exec, [&](std::size_t node) {
    const double mu = st.mu0[node];
    const double hn = model.h.empty() ? 0.0 : model.h[node];
    const auto geo = node_geometry(model, node);
    const auto& cd = model.curvature;
    const Eigen::MatrixXd Q = with_w1 && Qof(node).size() > 0 ? Qof(node) : Eigen::MatrixXd::Zero(N, N);

    auto dirs = base_dirs;
    if (with_w1) {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
      for (int c = 0; c < N; ++c) {
        const Eigen::VectorXd v = es.eigenvectors().col(c);
        dirs.emplace_back(v.data(), v.data() + N);
      }
    }
    ndirs[node] = dirs.size();

    double best = 0.0;
    for (const auto& th : dirs) {
      const double Y = Yof(node, th);
      const double thS = quad_form(geo.S, th);
      const double thM = quad_form(geo.M, th);
      double TQ = 0.0;
      if (with_w1)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            if (Q(i, j) == 0.0) continue;
            double t = 0.0;
            for (int m = 0; m < N; ++m)
              for (int l = 0; l < N; ++l) t += cd.normal(node, m, i, j, l) * th[m] * th[l];
            TQ += t * Q(i, j);
          }
      double thMQ = 0.0;
      if (with_w1) {
        const Eigen::Map<const Eigen::VectorXd> t(th.data(), N);
        thMQ = t.dot(geo.M * (Q * t));
      }

      // Neighbour values of w1 and of ξ·∇w1 along K at this direction.
      auto w1_at = [&](std::size_t m, std::size_t i, double ym) { return prof[m].f0[i] + prof[m].f2[i] * ym; };
      auto dw1_at = [&](std::size_t m, std::size_t i, double ym) {
        return grid[i] * (prof[m].f0d[i] + prof[m].f2d[i] * ym);
      };

      for (std::size_t i = 1; i < M; ++i) {
        const double r = grid[i];
        const double w = b.w0(r), dw = b.dw0(r), d2w = b.d2w0(r);
        double f0 = 0, f0d = 0, f0dd = 0, f2 = 0, f2d = 0, f2dd = 0;
        if (with_w1) {
          const auto& p = prof[node];
          f0 = p.f0[i];
          f0d = p.f0d[i];
          f0dd = p.f0dd[i];
          f2 = p.f2[i];
          f2d = p.f2d[i];
          f2dd = p.f2dd[i];
        }
        const double v = w + f0 + f2 * Y;
        const double d1 = r * (dw + f0d + f2d * Y);
        const double d2 = r * r * (d2w + f0dd + f2dd * Y);
        const double lap = d2w + (N - 1.0) / r * dw + f0dd + (N - 1.0) / r * f0d +
                           (f2dd + (N - 1.0) / r * f2d - 2.0 * N * f2 / (r * r)) * Y;

        double kl = 0.0, zterms = 0.0;
        if (with_w1 && n > 1) {
          double lapk = 0.0;
          for (int a = 0; a < k; ++a) {
            const std::size_t up = model.neighbor(node, a, 1), dn = model.neighbor(node, a, -1);
            const double h = model.spacing(a);
            const double yu = Yof(up, th), yd = Yof(dn, th);
            lapk += (w1_at(up, i, yu) - 2.0 * w1_at(node, i, Y) + w1_at(dn, i, yd)) / (h * h);
            const double dz_w = sqrt_eps * (w1_at(up, i, yu) - w1_at(dn, i, yd)) / (2.0 * h);
            const double dz_d = sqrt_eps * (dw1_at(up, i, yu) - dw1_at(dn, i, yd)) / (2.0 * h);
            zterms += dmu[a][node] * dz_d + b.gamma * dmu[a][node] * dz_w;
          }
          kl = eps * mu * mu * lapk;
          zterms *= -2.0 * eps * eps * mu;
        }
        const double a0 = -eps * mu * lap_mu[node] * (b.gamma * v + d1) +
                          eps * grad_sq[node] * (d2 + 2.0 * (1.0 + b.gamma) * d1 + b.gamma * (1.0 + b.gamma) * v) +
                          zterms;
        const double P = r * (dw + f0d) + (r * f2d - 2.0 * f2) * Y;
        const double a1 = -(eps / 3.0) * mu * mu * (P * thS + 2.0 * f2 * TQ);
        const double a2 = eps * mu * mu * (P * thM + 2.0 * f2 * thMQ);
        const double nonlin = F * std::pow(mu, -s * eps * b.gamma) * std::copysign(std::pow(std::abs(v), q), v);
        const double xi = -(kl + lap + a0 + a1 + a2) + eps * mu * mu * hn * v - nonlin;
        best = std::max(best, std::pow(1.0 + r * r, b.gamma) * std::abs(xi));
      }
    }
    out.per_node[node] = best;
  });
  for (double v : out.per_node) out.norm = std::max(out.norm, v);
  out.directions = ndirs.empty() ? 0 : ndirs.front();
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  YAMABE_REQUIRE(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
                 "least_squares_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  YAMABE_REQUIRE(sxx > 0.0, ErrorKind::InvalidArgument, "least_squares_slope: degenerate abscissae");
  return sxy / sxx;
}

ScalingResult scaling_study(const SubmanifoldModel& model, Version version, const std::vector<double>& eps_list,
                            const ProjectionConstants& c, const ConstructionOptions& opt) {
  YAMABE_REQUIRE(eps_list.size() >= 4, ErrorKind::InvalidArgument, "scaling_study: need at least 4 eps values");
  const auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
  YAMABE_REQUIRE(*hi / *lo >= 10.0, ErrorKind::InvalidArgument, "scaling_study: eps values must span a decade");
  ScalingResult out;
  out.eps = eps_list;
  std::vector<double> lx, ly;
  for (double e : eps_list) {
    const auto st = build_state(model, e, version, c, opt);
    const double nrm = residual(st, model, version, opt.exec).norm;
    out.norms.push_back(nrm);
    lx.push_back(std::log(e));
    ly.push_back(std::log(nrm));
  }
  // Residuals should shrink with ε; a violation points at an assembly bug.
  std::vector<std::size_t> order(eps_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps_list[a] < eps_list[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (out.norms[order[i]] < out.norms[order[i - 1]]) out.monotone = false;
  out.slope = least_squares_slope(lx, ly);
  return out;
}

}  // namespace yamabe
