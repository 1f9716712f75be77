// SPDX-License-Identifier: Apache-2.0
#include "yamabe/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SparseLU>

#include "yamabe/error.hpp"

namespace yamabe {

CurvatureData::CurvatureData(int n_normal, int k_tangent, std::size_t n_nodes)
    : N(n_normal), k(k_tangent), nodes(n_nodes) {
  YAMABE_REQUIRE(n_normal >= 1 && k_tangent >= 1, ErrorKind::InvalidArgument, "CurvatureData: bad dimensions");
  const std::size_t n4 = static_cast<std::size_t>(N) * N * N * N;
  const std::size_t nm = static_cast<std::size_t>(N) * k * k * N;
  R_normal.assign(n_nodes * n4, 0.0);
  R_mixed.assign(n_nodes * nm, 0.0);
  g_tilde.assign(n_nodes * k * k, 0.0);
  Gamma.assign(n_nodes * k * k * N, 0.0);
  for (std::size_t n = 0; n < n_nodes; ++n)
    for (int a = 0; a < k; ++a) g(n, a, a) = 1.0;
}

void CurvatureData::set_constant_curvature(double c) {
  for (std::size_t n = 0; n < nodes; ++n) {
    for (int m = 0; m < N; ++m)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int l = 0; l < N; ++l)
            normal(n, m, i, j, l) = c * ((m == j) * (i == l) - (m == l) * (i == j));
    for (int m = 0; m < N; ++m)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int j = 0; j < N; ++j) mixed(n, m, a, b, j) = m == j ? -c * g(n, a, b) : 0.0;
  }
}

void CurvatureData::validate() const {
  double scale = 1.0;
  for (double v : R_normal) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  for (std::size_t n = 0; n < nodes; ++n)
    for (int m = 0; m < N; ++m)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int l = 0; l < N; ++l) {
            const double v = normal(n, m, i, j, l);
            YAMABE_REQUIRE(std::abs(v + normal(n, i, m, j, l)) <= tol, ErrorKind::InvalidField,
                           "curvature: R_mijl must equal -R_imjl");
            YAMABE_REQUIRE(std::abs(v + normal(n, m, i, l, j)) <= tol, ErrorKind::InvalidField,
                           "curvature: R_mijl must equal -R_milj");
          }
  for (std::size_t n = 0; n < nodes; ++n) {
    Eigen::MatrixXd gm(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) gm(a, b) = g(n, a, b);
    YAMABE_REQUIRE((gm - gm.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * gm.cwiseAbs().maxCoeff(),
                   ErrorKind::InvalidField, "curvature: g_tilde must be symmetric");
    const Eigen::LLT<Eigen::MatrixXd> llt(gm);
    YAMABE_REQUIRE(llt.info() == Eigen::Success, ErrorKind::InvalidField,
                   "curvature: g_tilde must be positive definite");
  }
}

Eigen::MatrixXd CurvatureData::g_inverse(std::size_t n) const {
  Eigen::MatrixXd gm(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) gm(a, b) = g(n, a, b);
  return gm.inverse();
}

SubmanifoldModel::SubmanifoldModel(ManifoldKind kind, std::vector<double> lengths, std::vector<int> counts, int N,
                                   LaplacianScheme scheme)
    : kind_(kind), scheme_(scheme), lengths_(std::move(lengths)), counts_(std::move(counts)), N_(N) {
  const std::size_t dims = kind == ManifoldKind::Circle ? 1 : 2;
  YAMABE_REQUIRE(lengths_.size() == dims && counts_.size() == dims, ErrorKind::InvalidArgument,
                 "SubmanifoldModel: lengths/counts do not match the kind");
  YAMABE_REQUIRE(N >= 5, ErrorKind::InvalidArgument, "SubmanifoldModel: codimension N must be >= 5");
  size_ = 1;
  for (std::size_t d = 0; d < dims; ++d) {
    YAMABE_REQUIRE(lengths_[d] > 0.0 && std::isfinite(lengths_[d]), ErrorKind::InvalidArgument,
                   "SubmanifoldModel: lengths must be positive");
    YAMABE_REQUIRE(counts_[d] >= kMinNodesPerDim, ErrorKind::InvalidArgument,
                   "SubmanifoldModel: need at least 32 nodes per dimension");
    if (scheme == LaplacianScheme::Fourier)
      YAMABE_REQUIRE(counts_[d] % 2 == 0, ErrorKind::InvalidArgument, "SubmanifoldModel: Fourier needs even counts");
    size_ *= static_cast<std::size_t>(counts_[d]);
  }
  curvature = CurvatureData(N, static_cast<int>(dims), size_);
  h.assign(size_, 0.0);
}

SubmanifoldModel SubmanifoldModel::circle(double length, int n, int N, LaplacianScheme s) {
  return {ManifoldKind::Circle, {length}, {n}, N, s};
}

SubmanifoldModel SubmanifoldModel::torus(double l1, double l2, int n1, int n2, int N, LaplacianScheme s) {
  return {ManifoldKind::Torus, {l1, l2}, {n1, n2}, N, s};
}

double SubmanifoldModel::coordinate(std::size_t node, int d) const {
  const std::size_t i = d == 0 ? node % counts_[0] : node / counts_[0];
  return spacing(d) * static_cast<double>(i);
}

std::size_t SubmanifoldModel::neighbor(std::size_t node, int d, int step) const {
  const long n0 = counts_[0];
  long i0 = static_cast<long>(node % n0), i1 = static_cast<long>(node / n0);
  if (d == 0) {
    i0 = ((i0 + step) % n0 + n0) % n0;
  } else {
    const long n1 = counts_[1];
    i1 = ((i1 + step) % n1 + n1) % n1;
  }
  return static_cast<std::size_t>(i0 + n0 * i1);
}

double SubmanifoldModel::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < k(); ++d) v *= spacing(d);
  return v;
}

namespace {

Eigen::MatrixXd fourier_d2(int n, double length) {
  // Second derivative of the periodic trigonometric interpolant.
  const double h = 2.0 * std::numbers::pi / n;
  const double scale = std::pow(2.0 * std::numbers::pi / length, 2);
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int q = i - j;
      if (q == 0) {
        d(i, j) = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin(0.5 * q * h);
        d(i, j) = -((q % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
      }
      d(i, j) *= scale;
    }
  return d;
}

}  // namespace

Eigen::MatrixXd SubmanifoldModel::laplacian_dense() const {
  if (scheme_ == LaplacianScheme::Stencil) return Eigen::MatrixXd(laplacian());
  const auto d0 = fourier_d2(counts_[0], lengths_[0]);
  if (k() == 1) return d0;
  const auto d1 = fourier_d2(counts_[1], lengths_[1]);
  const int n0 = counts_[0], n1 = counts_[1];
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n0 * n1, n0 * n1);
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n0; ++i)
      for (int ip = 0; ip < n0; ++ip) out(i + n0 * j, ip + n0 * j) += d0(i, ip);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      for (int jp = 0; jp < n1; ++jp) out(i + n0 * j, i + n0 * jp) += d1(j, jp);
  return out;
}

Eigen::SparseMatrix<double> SubmanifoldModel::laplacian() const {
  const auto n = static_cast<Eigen::Index>(size_);
  Eigen::SparseMatrix<double> lap(n, n);
  if (scheme_ == LaplacianScheme::Fourier) {
    lap = laplacian_dense().sparseView();
    return lap;
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(size_ * (2 * k() + 1));
  for (std::size_t node = 0; node < size_; ++node) {
    double diag = 0.0;
    for (int d = 0; d < k(); ++d) {
      const double c = 1.0 / (spacing(d) * spacing(d));
      t.emplace_back(node, neighbor(node, d, -1), c);
      t.emplace_back(node, neighbor(node, d, +1), c);
      diag -= 2.0 * c;
    }
    t.emplace_back(node, node, diag);
  }
  lap.setFromTriplets(t.begin(), t.end());
  return lap;
}

std::vector<double> SubmanifoldModel::apply_laplacian(const std::vector<double>& f) const {
  YAMABE_REQUIRE(f.size() == size_, ErrorKind::InvalidArgument, "apply_laplacian: size mismatch");
  std::vector<double> out(size_, 0.0);
  if (scheme_ == LaplacianScheme::Fourier) {
    const Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(size_));
    const Eigen::VectorXd y = laplacian_dense() * x;
    for (std::size_t i = 0; i < size_; ++i) out[i] = y(static_cast<Eigen::Index>(i));
    return out;
  }
  for (std::size_t node = 0; node < size_; ++node) {
    double s = 0.0;
    for (int d = 0; d < k(); ++d) {
      const double c = 1.0 / (spacing(d) * spacing(d));
      s += c * f[neighbor(node, d, -1)] + c * f[neighbor(node, d, +1)] - 2.0 * c * f[node];
    }
    out[node] = s;
  }
  return out;
}

std::vector<double> SubmanifoldModel::derivative(const std::vector<double>& f, int d) const {
  std::vector<double> out(size_);
  const double inv = 1.0 / (2.0 * spacing(d));
  for (std::size_t node = 0; node < size_; ++node)
    out[node] = (f[neighbor(node, d, +1)] - f[neighbor(node, d, -1)]) * inv;
  return out;
}

std::vector<double> SubmanifoldModel::gradient_sq(const std::vector<double>& f) const {
  std::vector<double> out(size_, 0.0);
  for (int d = 0; d < k(); ++d) {
    const auto df = derivative(f, d);
    for (std::size_t i = 0; i < size_; ++i) out[i] += df[i] * df[i];
  }
  return out;
}

double SubmanifoldModel::integrate(const std::vector<double>& f) const {
  double s = 0.0;
  for (double v : f) s += v;
  return s * cell_volume();
}

std::vector<double> laplace_eigenvalues(const SubmanifoldModel& model, int count) {
  const Eigen::MatrixXd a = -model.laplacian_dense();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  YAMABE_REQUIRE(es.info() == Eigen::Success, ErrorKind::SpectralFailure, "laplace_eigenvalues: solver failed");
  const int n = std::min<int>(count, static_cast<int>(a.rows()));
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

namespace {

std::vector<double> circle_spectrum(int n, double length, LaplacianScheme s) {
  std::vector<double> v(n);
  const double h = length / n;
  for (int q = 0; q < n; ++q) {
    if (s == LaplacianScheme::Stencil) {
      const double sn = std::sin(std::numbers::pi * q / n);
      v[q] = 4.0 / (h * h) * sn * sn;
    } else {
      const double w = 2.0 * std::numbers::pi * std::min(q, n - q) / length;
      v[q] = w * w;
    }
  }
  return v;
}

std::vector<double> full_exact_spectrum(const SubmanifoldModel& model) {
  auto a = circle_spectrum(model.counts()[0], model.lengths()[0], model.scheme());
  if (model.k() == 2) {
    const auto b = circle_spectrum(model.counts()[1], model.lengths()[1], model.scheme());
    std::vector<double> s;
    s.reserve(a.size() * b.size());
    for (double x : a)
      for (double y : b) s.push_back(x + y);
    a = std::move(s);
  }
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

std::vector<double> laplace_eigenvalues_exact(const SubmanifoldModel& model, int count) {
  auto all = full_exact_spectrum(model);
  all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(count)));
  return all;
}

std::vector<double> distinct_positive_eigenvalues(const SubmanifoldModel& model, int count) {
  const auto all = full_exact_spectrum(model);
  std::vector<double> out;
  for (double v : all) {
    if (v <= 1e-12 * all.back()) continue;
    if (!out.empty() && std::abs(v - out.back()) <= 1e-9 * v) continue;
    out.push_back(v);
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

double check_minimality(const SubmanifoldModel& model) {
  const auto& c = model.curvature;
  double worst = 0.0;
  for (std::size_t n = 0; n < model.size(); ++n)
    for (int i = 0; i < c.N; ++i) {
      double s = 0.0;
      for (int a = 0; a < c.k; ++a) s += c.gamma(n, a, a, i);
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

double compute_omega(const SubmanifoldModel& model, std::size_t node, int sign) {
  YAMABE_REQUIRE(sign == 1 || sign == -1, ErrorKind::InvalidArgument, "compute_omega: sign must be +1 or -1");
  const auto& c = model.curvature;
  const int N = c.N, k = c.k;
  const Eigen::MatrixXd gi = c.g_inverse(node);
  double normal = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) normal += c.normal(node, j, i, j, i);
  double mixed = 0.0, gg = 0.0;
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        mixed += gi(a, b) * -c.mixed(node, i, a, b, i);  // R_{iaib} = -R_{iabi}
        gg += c.gamma(node, a, b, i) * c.gamma(node, b, a, i);
      }
  return sign * 3.0 * (N - 2) / (4.0 * (N - 1)) * (normal / 3.0 + mixed + gg);
}

std::vector<double> omega_field(const SubmanifoldModel& model, int sign) {
  std::vector<double> out(model.size());
  for (std::size_t n = 0; n < model.size(); ++n) out[n] = compute_omega(model, n, sign);
  return out;
}

Eigen::MatrixXd normal_trace_matrix(const SubmanifoldModel& model, std::size_t node) {
  const auto& c = model.curvature;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(c.N, c.N);
  for (int m = 0; m < c.N; ++m)
    for (int l = 0; l < c.N; ++l)
      for (int i = 0; i < c.N; ++i) s(m, l) += c.normal(node, m, i, i, l);
  return s;
}

Eigen::MatrixXd first_order_matrix(const SubmanifoldModel& model, std::size_t node) {
  const auto& c = model.curvature;
  const Eigen::MatrixXd gi = c.g_inverse(node);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.N, c.N);
  for (int m = 0; m < c.N; ++m)
    for (int j = 0; j < c.N; ++j) {
      double s = 0.0;
      for (int q = 0; q < c.N; ++q) s += c.normal(node, m, q, q, j);
      double t = 0.0;
      for (int a = 0; a < c.k; ++a)
        for (int b = 0; b < c.k; ++b)
          t += gi(a, b) * c.mixed(node, m, a, b, j) - c.gamma(node, a, b, m) * c.gamma(node, b, a, j);
      out(m, j) = 2.0 / 3.0 * s + t;
    }
  return out;
}

Eigen::MatrixXd jacobi_potential(const SubmanifoldModel& model, std::size_t node) {
  const auto& c = model.curvature;
  const Eigen::MatrixXd gi = c.g_inverse(node);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(c.N, c.N);
  for (int l = 0; l < c.N; ++l)
    for (int m = 0; m < c.N; ++m) {
      double t = 0.0;
      for (int a = 0; a < c.k; ++a)
        for (int b = 0; b < c.k; ++b)
          t += gi(a, b) * c.mixed(node, m, a, b, l) - c.gamma(node, a, b, m) * c.gamma(node, b, a, l);
      v(l, m) = t;
    }
  return v;
}

Eigen::SparseMatrix<double> jacobi_operator(const SubmanifoldModel& model) {
  const int N = model.N();
  const auto n = static_cast<Eigen::Index>(model.size());
  const Eigen::SparseMatrix<double> lap = model.laplacian();
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index col = 0; col < lap.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lap, col); it; ++it)
      for (int l = 0; l < N; ++l) t.emplace_back(it.row() * N + l, it.col() * N + l, -it.value());
  for (Eigen::Index node = 0; node < n; ++node) {
    const auto v = jacobi_potential(model, static_cast<std::size_t>(node));
    for (int l = 0; l < N; ++l)
      for (int m = 0; m < N; ++m)
        if (v(l, m) != 0.0) t.emplace_back(node * N + l, node * N + m, v(l, m));
  }
  Eigen::SparseMatrix<double> j(n * N, n * N);
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

JacobiCheck singular_value_bounds(const Eigen::SparseMatrix<double>& a, double rel_threshold) {
  JacobiCheck out;
  const Eigen::Index n = a.rows();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = dist(rng);
  start.normalize();

  const Eigen::SparseMatrix<double> at = a.transpose();
  Eigen::VectorXd x = start;
  double big = 0.0;
  for (int it = 0; it < 300; ++it) {
    Eigen::VectorXd y = at * (a * x);
    big = y.norm();
    if (big == 0.0) break;
    x = y / big;
  }
  out.sigma_max = std::sqrt(big);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu, lut;
  lu.compute(a);
  lut.compute(at);
  if (lu.info() != Eigen::Success || lut.info() != Eigen::Success) {
    out.sigma_min = 0.0;
  } else {
    x = start;
    double nu = 0.0;
    for (int it = 0; it < 500; ++it) {
      const Eigen::VectorXd z = lut.solve(x);
      const Eigen::VectorXd y = lu.solve(z);
      const double nrm = y.norm();
      if (!std::isfinite(nrm)) {
        nu = std::numeric_limits<double>::infinity();
        break;
      }
      const bool done = std::abs(nrm - nu) <= 1e-13 * nrm;
      nu = nrm;
      x = y / nrm;
      if (done) break;
    }
    out.sigma_min = std::isfinite(nu) ? 1.0 / std::sqrt(nu) : 0.0;
  }
  out.degenerate = out.sigma_min < rel_threshold * out.sigma_max;
  return out;
}

JacobiCheck jacobi_nondegeneracy(const SubmanifoldModel& model) {
  return singular_value_bounds(jacobi_operator(model));
}

}  // namespace yamabe
