// SPDX-License-Identifier: Apache-2.0
#include "yamabe/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "yamabe/error.hpp"

namespace yamabe {

std::vector<double> SymTridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = diag.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

int sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t n = t.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double q = t.diag[0] - x;
  if (q == 0.0) q = -tiny;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

namespace {

double inf_norm(const SymTridiagonal& t) {
  double nrm = 0.0;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(t.diag[i]);
    if (i > 0) row += std::abs(t.off[i - 1]);
    if (i + 1 < n) row += std::abs(t.off[i]);
    nrm = std::max(nrm, row);
  }
  return nrm;
}

double bisect_eigenvalue(const SymTridiagonal& t, int index, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + std::numeric_limits<double>::min()) break;
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<EigenPair> sym_eig_smallest(const SymTridiagonal& t, int count) {
  const std::size_t n = t.size();
  YAMABE_REQUIRE(n > 0 && t.off.size() + 1 == n, ErrorKind::InvalidArgument,
                 "sym_eig_smallest: malformed tridiagonal");
  YAMABE_REQUIRE(count >= 1 && static_cast<std::size_t>(count) <= n, ErrorKind::InvalidArgument,
                 "sym_eig_smallest: count out of range");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double norm = std::max(inf_norm(t), std::numeric_limits<double>::min());
  lo -= 1e-12 * norm;
  hi += 1e-12 * norm;

  std::vector<EigenPair> out;
  out.reserve(count);
  const double cluster_tol = 1e-3 * norm;
  const double perturb = 4.0 * std::numeric_limits<double>::epsilon() * norm;
  std::vector<double> lower(t.off), upper(t.off), shifted(n);

  for (int k = 0; k < count; ++k) {
    const double lambda = bisect_eigenvalue(t, k, lo, hi);

    for (std::size_t i = 0; i < n; ++i) shifted[i] = t.diag[i] - lambda - perturb;
    const TridiagonalLU lu(lower, shifted, upper);

    std::mt19937_64 rng(0x5eedULL + static_cast<unsigned long long>(k));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);

    auto orthonormalize = [&](std::vector<double>& v) {
      for (const auto& prev : out) {
        if (std::abs(prev.value - lambda) > cluster_tol) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += prev.vector[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * prev.vector[i];
      }
      double nrm = 0.0;
      for (double a : v) nrm += a * a;
      nrm = std::sqrt(nrm);
      if (nrm == 0.0 || !std::isfinite(nrm))
        throw Error(ErrorKind::SpectralFailure, "sym_eig_smallest: inverse iteration broke down");
      for (double& a : v) a /= nrm;
    };

    orthonormalize(x);
    for (int it = 0; it < 5; ++it) {
      x = lu.solve(x);
      orthonormalize(x);
    }
    // Deterministic sign: largest-magnitude component positive.
    const auto big = std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*big < 0.0)
      for (double& v : x) v = -v;
    out.push_back({lambda, std::move(x)});
  }
  return out;
}

std::vector<EigenPair> sym_eig_smallest(const Eigen::MatrixXd& a, int count) {
  YAMABE_REQUIRE(a.rows() == a.cols() && a.rows() > 0, ErrorKind::InvalidArgument,
                 "sym_eig_smallest: matrix must be square and non-empty");
  YAMABE_REQUIRE(count >= 1 && count <= a.rows(), ErrorKind::InvalidArgument,
                 "sym_eig_smallest: count out of range");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  YAMABE_REQUIRE(asym <= 1e-12 * scale, ErrorKind::ContractViolation,
                 "sym_eig_smallest: matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  YAMABE_REQUIRE(es.info() == Eigen::Success, ErrorKind::SpectralFailure, "sym_eig_smallest: eigensolver failed");
  std::vector<EigenPair> out;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    out.push_back({es.eigenvalues()(k), std::vector<double>(v.data(), v.data() + v.size())});
  }
  return out;
}

TridiagonalLU::TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                             std::span<const double> upper)
    : dl_(lower.begin(), lower.end()),
      d_(diag.begin(), diag.end()),
      du_(upper.begin(), upper.end()),
      du2_(diag.size() > 2 ? diag.size() - 2 : 0, 0.0),
      ipiv_(diag.size(), 0) {
  const std::size_t n = d_.size();
  YAMABE_REQUIRE(n > 0 && dl_.size() + 1 == n && du_.size() + 1 == n, ErrorKind::InvalidArgument,
                 "TridiagonalLU: inconsistent band sizes");
  for (std::size_t i = 0; i < n; ++i) ipiv_[i] = static_cast<int>(i);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] != 0.0) {
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    } else {
      const double fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const double temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < n) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      ipiv_[i] = static_cast<int>(i + 1);
    }
  }
  for (double v : d_)
    if (v == 0.0) singular_ = true;
}

std::vector<double> TridiagonalLU::solve(std::span<const double> rhs) const {
  const std::size_t n = d_.size();
  YAMABE_REQUIRE(rhs.size() == n, ErrorKind::InvalidArgument, "TridiagonalLU::solve: size mismatch");
  YAMABE_REQUIRE(!singular_, ErrorKind::SolverFailure, "TridiagonalLU::solve: singular matrix");
  std::vector<double> b(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t ip = static_cast<std::size_t>(ipiv_[i]);
    const double temp = b[2 * i + 1 - ip] - dl_[i] * b[ip];
    b[i] = b[ip];
    b[i + 1] = temp;
  }
  b[n - 1] /= d_[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
  for (std::size_t k = n; k-- > 2;) {
    const std::size_t i = k - 2;
    b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }
  return b;
}

}  // namespace yamabe
