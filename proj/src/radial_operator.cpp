// SPDX-License-Identifier: Apache-2.0
#include "yamabe/radial_operator.hpp"

#include <cmath>

#include "yamabe/error.hpp"

namespace yamabe {

RadialOperator::RadialOperator(int mode, int dim, const RadialField& potential)
    : mode_(mode), dim_(dim), grid_(potential.grid) {
  YAMABE_REQUIRE(potential.all_finite(), ErrorKind::InvalidField, "radial operator: non-finite potential");
  assemble(&potential.values);
}

RadialOperator::RadialOperator(int mode, int dim, const RadialGrid& grid) : mode_(mode), dim_(dim), grid_(grid) {
  assemble(nullptr);
}

void RadialOperator::assemble(const std::vector<double>* potential) {
  YAMABE_REQUIRE(mode_ >= 0 && mode_ <= 2, ErrorKind::ModeOutOfRange, "radial operator: mode must be 0, 1 or 2");
  YAMABE_REQUIRE(dim_ >= 1, ErrorKind::InvalidArgument, "radial operator: dimension must be >= 1");
  YAMABE_REQUIRE(grid_.size() >= 4, ErrorKind::InvalidArgument, "radial operator: grid too small");
  const auto r = grid_.nodes();
  const int d = reduced_dim();
  const std::size_t n_nodes = grid_.size();

  std::vector<double> face(n_nodes - 1), kappa(n_nodes - 1);
  for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
    face[i] = 0.5 * (r[i] + r[i + 1]);
    kappa[i] = std::pow(face[i], d - 1) / (r[i + 1] - r[i]);
  }

  const std::size_t m = unknowns();
  k_.diag.assign(m, 0.0);
  k_.off.assign(m - 1, 0.0);
  vol_.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double inner = i == 0 ? 0.0 : face[i - 1];
    const double vi = (std::pow(face[i], d) - std::pow(inner, d)) / d;
    const double pot = potential ? (*potential)[i] : 0.0;
    vol_[i] = vi;
    k_.diag[i] = kappa[i] + (i == 0 ? 0.0 : kappa[i - 1]) + vi * pot;
    if (i + 1 < m) k_.off[i] = -kappa[i];
  }
  right_ = -kappa[m - 1];
}

double even_extrapolate_origin(double r1, double f1, double r2, double f2) {
  const double a = r1 * r1, b = r2 * r2;
  return (f1 * b - f2 * a) / (b - a);
}

std::vector<double> RadialOperator::reduce(const std::vector<double>& phi) const {
  YAMABE_REQUIRE(phi.size() == grid_.size(), ErrorKind::InvalidArgument, "RadialOperator::reduce: size mismatch");
  if (mode_ == 0) return phi;
  std::vector<double> psi(phi.size());
  for (std::size_t i = 1; i < phi.size(); ++i) psi[i] = phi[i] / std::pow(grid_[i], mode_);
  psi[0] = even_extrapolate_origin(grid_[1], psi[1], grid_[2], psi[2]);
  return psi;
}

std::vector<double> RadialOperator::expand(const std::vector<double>& psi) const {
  YAMABE_REQUIRE(psi.size() == grid_.size(), ErrorKind::InvalidArgument, "RadialOperator::expand: size mismatch");
  if (mode_ == 0) return psi;
  std::vector<double> phi(psi.size());
  phi[0] = 0.0;
  for (std::size_t i = 1; i < psi.size(); ++i) phi[i] = std::pow(grid_[i], mode_) * psi[i];
  return phi;
}

std::vector<double> RadialOperator::apply(const std::vector<double>& phi) const {
  const auto psi = reduce(phi);
  std::vector<double> out(phi.size(), 0.0);
  const std::size_t m = unknowns();
  for (std::size_t i = first(); i < m; ++i) {
    double s = k_.diag[i] * psi[i];
    if (i > 0) s += k_.off[i - 1] * psi[i - 1];
    s += i + 1 < m ? k_.off[i] * psi[i + 1] : right_ * psi[i + 1];
    out[i] = s / vol_[i] * (mode_ == 0 ? 1.0 : std::pow(grid_[i], mode_));
  }
  return out;
}

SymTridiagonal RadialOperator::symmetric_form() const {
  SymTridiagonal s;
  const std::size_t m = unknowns();
  s.diag.resize(m);
  s.off.resize(m - 1);
  for (std::size_t i = 0; i < m; ++i) s.diag[i] = k_.diag[i] / vol_[i];
  for (std::size_t i = 0; i + 1 < m; ++i) s.off[i] = k_.off[i] / std::sqrt(vol_[i] * vol_[i + 1]);
  return s;
}

Eigen::MatrixXd RadialOperator::symmetric_dense() const {
  const SymTridiagonal s = symmetric_form();
  const auto m = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) a(i, i) = s.diag[i];
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    a(i, i + 1) = s.off[i];
    a(i + 1, i) = s.off[i];
  }
  return a;
}

RadialOperator radial_operator_matrix(int mode, int dim, const RadialField& potential) {
  return {mode, dim, potential};
}

double max_row_residual(const RadialOperator& op, const std::vector<double>& u, const std::vector<double>& f) {
  YAMABE_REQUIRE(f.size() == u.size(), ErrorKind::InvalidArgument, "max_row_residual: size mismatch");
  const auto au = op.apply(u);
  double e = 0.0;
  for (std::size_t i = op.first(); i <= op.last(); ++i) e = std::max(e, std::abs(au[i] - f[i]));
  return e;
}

double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace yamabe
