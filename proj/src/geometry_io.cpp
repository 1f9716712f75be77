// SPDX-License-Identifier: Apache-2.0
#include "yamabe/geometry_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, "geometry." + field + ": " + what);
}

// A scalar field on K: a number, one value per node, or a trigonometric sum
// {"constant": c, "cos": [{"amp": a, "k": [k1, ...]}], "sin": [...]} with
// phases 2π Σ k_d y_d / L_d.
std::vector<double> read_field(const json& j, const SubmanifoldModel& m, const std::string& field) {
  const std::size_t n = m.size();
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (j.is_array()) {
    if (j.size() != n) bad(field, "expected " + std::to_string(n) + " values, got " + std::to_string(j.size()));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!j[i].is_number()) bad(field, "entry " + std::to_string(i) + " is not a number");
      out[i] = j[i].get<double>();
    }
    return out;
  }
  if (!j.is_object()) bad(field, "must be a number, an array or a {constant, cos, sin} object");
  for (const auto& [key, _] : j.items())
    if (key != "constant" && key != "cos" && key != "sin") bad(field, "unknown key '" + key + "'");
  std::vector<double> out(n, j.value("constant", 0.0));
  for (const char* kind : {"cos", "sin"}) {
    if (!j.contains(kind)) continue;
    const auto& terms = j.at(kind);
    if (!terms.is_array()) bad(field + "." + kind, "must be an array of {amp, k}");
    for (const auto& t : terms) {
      if (!t.contains("amp") || !t.contains("k") || !t.at("k").is_array() ||
          static_cast<int>(t.at("k").size()) != m.k())
        bad(field + "." + kind, "each term needs amp and k with one entry per dimension of K");
      const double amp = t.at("amp").get<double>();
      for (std::size_t i = 0; i < n; ++i) {
        double phase = 0.0;
        for (int d = 0; d < m.k(); ++d)
          phase += 2.0 * std::numbers::pi * t.at("k")[d].get<double>() * m.coordinate(i, d) / m.lengths()[d];
        out[i] += amp * (kind[0] == 'c' ? std::cos(phase) : std::sin(phase));
      }
    }
  }
  return out;
}

std::vector<int> read_index(const json& e, std::size_t len, const std::vector<int>& bounds, const std::string& field) {
  if (!e.contains("index") || !e.at("index").is_array() || e.at("index").size() != len)
    bad(field, "each entry needs an index of length " + std::to_string(len));
  std::vector<int> idx(len);
  for (std::size_t q = 0; q < len; ++q) {
    idx[q] = e.at("index")[q].get<int>();
    if (idx[q] < 0 || idx[q] >= bounds[q]) bad(field, "index out of range");
  }
  if (!e.contains("value")) bad(field, "each entry needs a value");
  return idx;
}

}  // namespace

GeometryFile parse_geometry(std::string_view text, int N) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, std::string("geometry: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) bad("(root)", "must be an object");
  static const char* known[] = {"kind", "lengths", "counts", "N", "scheme", "h", "constant_curvature",
                                "R_normal", "R_mixed", "g_tilde", "Gamma", "alpha", "beta", "description"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) bad(key, "unknown field");
  }
  if (j.contains("N") && j.at("N").get<int>() != N)
    bad("N", "file is for N = " + std::to_string(j.at("N").get<int>()) + ", run uses N = " + std::to_string(N));

  const std::string kind = j.value("kind", "");
  ManifoldKind mk;
  if (kind == "circle")
    mk = ManifoldKind::Circle;
  else if (kind == "torus")
    mk = ManifoldKind::Torus;
  else
    bad("kind", "must be \"circle\" or \"torus\"");
  const std::size_t dims = mk == ManifoldKind::Circle ? 1 : 2;
  if (!j.contains("lengths") || !j.at("lengths").is_array() || j.at("lengths").size() != dims)
    bad("lengths", "expected " + std::to_string(dims) + " positive lengths");
  if (!j.contains("counts") || !j.at("counts").is_array() || j.at("counts").size() != dims)
    bad("counts", "expected " + std::to_string(dims) + " node counts");
  const auto lengths = j.at("lengths").get<std::vector<double>>();
  const auto counts = j.at("counts").get<std::vector<int>>();
  for (double l : lengths)
    if (!(l > 0.0)) bad("lengths", "must be positive");
  for (int c : counts)
    if (c < SubmanifoldModel::kMinNodesPerDim)
      bad("counts", "need at least " + std::to_string(SubmanifoldModel::kMinNodesPerDim) + " nodes per dimension");
  const std::string scheme = j.value("scheme", "stencil");
  if (scheme != "stencil" && scheme != "fourier") bad("scheme", "must be \"stencil\" or \"fourier\"");

  GeometryFile g{SubmanifoldModel(mk, lengths, counts, N,
                                  scheme == "fourier" ? LaplacianScheme::Fourier : LaplacianScheme::Stencil),
                 std::nullopt, std::nullopt};
  auto& m = g.model;
  const int k = m.k();
  m.h = j.contains("h") ? read_field(j.at("h"), m, "h") : std::vector<double>(m.size(), 0.0);
  if (j.contains("constant_curvature")) m.curvature.set_constant_curvature(j.at("constant_curvature").get<double>());

  auto entries = [&](const char* field, std::size_t len, const std::vector<int>& bounds, auto&& assign) {
    if (!j.contains(field)) return;
    if (!j.at(field).is_array()) bad(field, "must be an array of {index, value}");
    for (const auto& e : j.at(field)) {
      const auto idx = read_index(e, len, bounds, field);
      const auto v = read_field(e.at("value"), m, field);
      for (std::size_t n = 0; n < m.size(); ++n) assign(n, idx, v[n]);
    }
  };
  entries("R_normal", 4, {N, N, N, N},
          [&](std::size_t n, const std::vector<int>& q, double v) { m.curvature.normal(n, q[0], q[1], q[2], q[3]) = v; });
  entries("R_mixed", 4, {N, k, k, N},
          [&](std::size_t n, const std::vector<int>& q, double v) { m.curvature.mixed(n, q[0], q[1], q[2], q[3]) = v; });
  entries("g_tilde", 2, {k, k}, [&](std::size_t n, const std::vector<int>& q, double v) { m.curvature.g(n, q[0], q[1]) = v; });
  entries("Gamma", 3, {k, k, N},
          [&](std::size_t n, const std::vector<int>& q, double v) { m.curvature.gamma(n, q[0], q[1], q[2]) = v; });
  m.curvature.validate();

  if (j.contains("alpha")) g.alpha = read_field(j.at("alpha"), m, "alpha");
  if (j.contains("beta")) g.beta = read_field(j.at("beta"), m, "beta");
  return g;
}

GeometryFile load_geometry(const std::string& path, int N) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "geometry: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_geometry(ss.str(), N);
}

}  // namespace yamabe
