// SPDX-License-Identifier: Apache-2.0
#include "yamabe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "yamabe/bubble.hpp"
#include "yamabe/constants.hpp"
#include "yamabe/construction.hpp"
#include "yamabe/error.hpp"
#include "yamabe/geometry_io.hpp"
#include "yamabe/radial_operator.hpp"
#include "yamabe/singular_pde.hpp"

namespace yamabe::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// nlohmann prints the shortest round-trip form; artifacts use a fixed
// 17-digit format instead, so numbers are emitted here. Objects are sorted.
void emit(std::ostream& os, const json& j, int depth) {
  const std::string pad(2 * depth + 2, ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(k).dump() << ": ";
        emit(os, v, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        emit(os, j[i], depth + 1);
      }
      os << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? fmt(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  emit(out, j, 0);
  out << "\n";
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << fmt(v[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, "config." + field + ": " + what);
}

Regime regime_of(const RunConfig& c) { return c.regime == "supercritical" ? Regime::Supercritical : Regime::Subcritical; }
Version version_of(const RunConfig& c) { return c.version == "v0" ? Version::V0 : Version::V1; }

double rel_err(double v, double target) { return std::abs(v - target) / std::abs(target); }

json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["N"] = c.N;
  j["geometry"] = c.geometry;
  j["eps"] = to_json(c.eps);
  j["r_out"] = c.r_out ? json(*c.r_out) : json(nullptr);
  j["intervals"] = c.intervals ? json(*c.intervals) : json(nullptr);
  j["grading"] = c.grading;
  j["eta"] = c.eta;
  j["tol"] = c.tol;
  j["omega_sign"] = c.omega_sign;
  j["regime"] = c.regime;
  j["version"] = c.version;
  return j;
}

bool all_true(const json& checks) {
  for (const auto& [_, v] : checks.items())
    if (!v.get<bool>()) return false;
  return true;
}

GeometryFile geometry_of(const RunConfig& c) {
  if (c.geometry.empty()) bad("geometry", "required for " + c.command);
  return load_geometry(c.geometry, c.N);
}

std::vector<double> coords(const SubmanifoldModel& m, std::size_t i) {
  std::vector<double> y;
  for (int d = 0; d < m.k(); ++d) y.push_back(m.coordinate(i, d));
  return y;
}

std::vector<std::string> coord_names(const SubmanifoldModel& m) {
  return m.k() == 1 ? std::vector<std::string>{"y"} : std::vector<std::string>{"y1", "y2"};
}

// ---------------------------------------------------------------- commands

void cmd_constants(const RunConfig& cfg, const fs::path& dir, json& s) {
  const int N = cfg.N;
  const RadialGrid g = (cfg.r_out || cfg.intervals)
                           ? RadialGrid(cfg.r_out.value_or(1e4), cfg.intervals.value_or(4096), cfg.grading)
                           : default_constants_grid();
  const auto c = compute_constants(N, g);
  const auto cr = compute_constants(N, g.refined());
  const double ea = rel_err(c.ratio_a(), c.a_N), eb = rel_err(c.ratio_b(), c.b_N),
               ec = rel_err(c.ratio_c2(), c.target_c2());
  const double drift = std::max({rel_err(c.c1, cr.c1), rel_err(c.c2, cr.c2), rel_err(c.c3, cr.c3),
                                 rel_err(c.c4, cr.c4), rel_err(c.C0, cr.C0)});
  json checks;
  checks["ratio_a"] = ea <= 1e-6;
  checks["ratio_b"] = eb <= 1e-6;
  checks["ratio_c2"] = ec <= 1e-6;
  checks["grid_converged"] = drift <= 1e-6;

  Csv csv(dir / "constants.csv", {"N", "c1", "c2", "c3", "c4", "C0", "ratio_a", "ratio_b", "ratio_c2", "target_a",
                                  "target_b", "target_c2", "relerr_a", "relerr_b", "relerr_c2", "pass_a", "pass_b",
                                  "pass_c2"});
  csv.row({double(N), c.c1, c.c2, c.c3, c.c4, c.C0, c.ratio_a(), c.ratio_b(), c.ratio_c2(), c.a_N, c.b_N,
           c.target_c2(), ea, eb, ec, ea <= 1e-6 ? 1.0 : 0.0, eb <= 1e-6 ? 1.0 : 0.0, ec <= 1e-6 ? 1.0 : 0.0});

  json k;
  for (auto [name, v] : {std::pair{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}, {"C0", c.C0},
                         {"ratio_a", c.ratio_a()}, {"ratio_b", c.ratio_b()}, {"ratio_c2", c.ratio_c2()},
                         {"closed_form_a", c.a_N}, {"closed_form_b", c.b_N}, {"relerr_a", ea}, {"relerr_b", eb},
                         {"relerr_c2", ec}})
    k[name] = v;
  k["grid_relative_drift"] = drift;
  s["compute_constants"] = k;
  s["checks"] = checks;
}

void cmd_profile(const RunConfig& cfg, const fs::path& dir, json& s) {
  const int N = cfg.N;
  const BubbleFamily b(N);
  const RadialGrid g(cfg.r_out.value_or(50.0), cfg.intervals.value_or(2048), cfg.grading);
  Csv csv(dir / "profile.csv", {"r", "w0", "dw0", "Z0", "w0p_ln_w0"});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g[i];
    csv.row({r, b.w0(r), b.dw0(r), b.z0(r), b.w0p_ln_w0(r)});
  }

  const auto cg = default_constants_grid();
  const auto c = compute_constants(N, cg);
  const double t1 = verify_T1_orthogonality(N, cg);
  const double sd = verify_second_derivative_identity(N, cg);

  // Bubble equation residual under doubling.
  auto err = [&](int m) {
    const RadialGrid gg(20.0, m);
    const RadialOperator op(0, N, gg);
    const auto w = sample_w0(gg, N);
    const auto f = RadialField::sample(gg, [&](double r) { return b.w0_pow(r, b.p); });
    return max_row_residual(op, w.values, f.values);
  };
  const double e1 = err(256), e2 = err(512), e3 = err(1024);

  json k;
  k["alpha_N"] = b.alpha;
  k["p"] = b.p;
  k["gamma"] = b.gamma;
  s["bubble"] = k;
  s["verify_T1_orthogonality"] = {{"value", t1}, {"relative_to_c1", std::abs(t1) / c.c1}};
  s["verify_second_derivative_identity"] = {{"value", sd}, {"target", -0.5 * c.C0},
                                            {"relative_error", rel_err(sd, -0.5 * c.C0)}};
  s["bubble_equation_residual"] = {{"errors", to_json({e1, e2, e3})},
                                   {"orders", to_json({observed_order(e1, e2), observed_order(e2, e3)})}};
  json checks;
  checks["T1_orthogonality"] = std::abs(t1) <= 1e-8 * c.c1;
  checks["second_derivative_identity"] = rel_err(sd, -0.5 * c.C0) <= 1e-6;
  checks["bubble_equation_order"] = std::min(observed_order(e1, e2), observed_order(e2, e3)) >= 1.9;
  s["checks"] = checks;
}

void cmd_eigenpair(const RunConfig& cfg, const fs::path& dir, json& s) {
  const int N = cfg.N;
  const double R = cfg.r_out.value_or(20.0);
  const int M = cfg.intervals.value_or(8192);
  const RadialGrid g(R, M, cfg.grading);
  const auto e = compute_eigenpair(g, N);
  Csv csv(dir / "eigenpair.csv", {"r", "Z"});
  for (std::size_t i = 0; i < g.size(); ++i) csv.row({g[i], e.Zeig[i]});

  const double norm = radial_inner(e.Zeig, e.Zeig, N);
  const double slope = tail_decay_slope(e.Zeig, N, 0.3 * R, 0.7 * R);
  const double target = -std::sqrt(e.lambda0);
  const auto study = eigenvalue_study(R, M / 2, N);
  json k;
  k["lambda0"] = e.lambda0;
  k["norm"] = norm;
  k["tail_slope"] = slope;
  k["tail_slope_target"] = target;
  k["leading"] = to_json(e.leading);
  s["compute_eigenpair"] = k;
  s["eigenvalue_study"] = {{"coarse", study.coarse},
                           {"fine", study.fine},
                           {"finer", study.finer},
                           {"extrapolated_coarse", study.extrap_coarse},
                           {"extrapolated_fine", study.extrap_fine},
                           {"agreement", study.agreement()}};
  json checks;
  checks["positive"] = e.lambda0 > 0.0;
  checks["normalized"] = std::abs(norm - 1.0) <= 1e-10;
  checks["two_resolution_agreement"] = study.agreement() <= 1e-6;
  checks["tail_slope"] = std::abs(slope / target - 1.0) <= 0.05;
  s["checks"] = checks;
}

void write_solution(const fs::path& path, const SubmanifoldModel& m, const std::vector<double>& u,
                    const std::vector<double>& res) {
  auto header = coord_names(m);
  header.insert(header.end(), {"u", "residual"});
  Csv csv(path, header);
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto row = coords(m, i);
    row.push_back(u[i]);
    row.push_back(res[i]);
    csv.row(row);
  }
}

SingularProblem problem_of(const GeometryFile& g, Singularity sign) {
  if (!g.alpha) bad("geometry.alpha", "required by the singular solvers");
  if (!g.beta) bad("geometry.beta", "required by the singular solvers");
  return SingularProblem(g.model, *g.alpha, *g.beta, sign);
}

json solution_json(const SingularProblem& p, const SingularSolution& sol) {
  json k;
  k["residual_norm"] = sol.residual_norm;
  k["nondegenerate"] = sol.nondegenerate;
  k["linearized_eigs"] = to_json(sol.linearized_eigs);
  k["min_abs_eig"] = sol.min_abs_eig;
  k["newton_steps"] = sol.newton_steps;
  k["integral_identity"] = p.integral_identity(sol.u);
  k["u_min"] = *std::min_element(sol.u.begin(), sol.u.end());
  k["u_max"] = *std::max_element(sol.u.begin(), sol.u.end());
  return k;
}

void cmd_attractive(const RunConfig& cfg, const fs::path& dir, json& s) {
  const auto g = geometry_of(cfg);
  const auto p = problem_of(g, Singularity::Attractive);
  const auto sol = solve_attractive(p, cfg.tol);
  write_solution(dir / "solution.csv", g.model, sol.u, p.residual(sol.u));
  auto k = solution_json(p, sol);
  k["monotone"] = sol.monotone;
  k["monotone_steps"] = sol.monotone_steps;
  const auto br = bracket_constants(p);
  k["bracket"] = {{"lower", br.lower}, {"upper", br.upper}};
  s["solve_attractive"] = k;
  const double amin = *std::min_element(p.alpha.begin(), p.alpha.end());
  json checks;
  checks["monotone"] = sol.monotone;
  checks["nondegenerate"] = sol.nondegenerate;
  checks["eigenvalue_above_min_alpha"] =
      !sol.linearized_eigs.empty() && sol.linearized_eigs.front() >= amin - 1e-8;
  checks["integral_identity"] = std::abs(p.integral_identity(sol.u)) <= 1e-8;
  s["checks"] = checks;
}

void cmd_repulsive(const RunConfig& cfg, const fs::path& dir, json& s) {
  const auto g = geometry_of(cfg);
  const auto p = problem_of(g, Singularity::Repulsive);
  const auto feas = repulsive_feasibility(p);
  s["repulsive_feasibility"] = {{"feasible", feas.feasible}, {"min_alpha", feas.min_alpha}, {"reason", feas.reason}};
  if (!feas.feasible) {
    s["reason"] = feas.reason;
    throw Error(ErrorKind::Precondition, feas.reason);
  }
  const auto sol = solve_repulsive(p, cfg.tol);
  write_solution(dir / "solution.csv", g.model, sol.u, p.residual(sol.u));
  s["solve_repulsive"] = solution_json(p, sol);
  json checks;
  checks["integral_identity"] = std::abs(p.integral_identity(sol.u)) <= 1e-8;
  if (p.constant_coefficients()) {
    const bool window = spectral_window(g.model, p.alpha.front());
    s["spectral_window"] = {{"inside", window}};
    checks["window_agrees"] = window == sol.nondegenerate;
  }
  s["checks"] = checks;
}

void cmd_jacobi(const RunConfig& cfg, const fs::path&, json& s) {
  const auto g = geometry_of(cfg);
  const auto jc = jacobi_nondegeneracy(g.model);
  s["jacobi_nondegeneracy"] = {{"sigma_min", jc.sigma_min}, {"sigma_max", jc.sigma_max}, {"degenerate", jc.degenerate}};
  s["check_minimality"] = check_minimality(g.model);
  s["checks"] = json::object();
}

ConstructionOptions construction_options(const RunConfig& cfg) {
  ConstructionOptions o;
  o.regime = regime_of(cfg);
  o.omega_sign = cfg.omega_sign;
  o.eta = cfg.eta;
  o.intervals = cfg.intervals.value_or(2048);
  o.grading = cfg.grading;
  return o;
}

void write_w1_profiles(const fs::path& path, const ConstructionState& st) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "# w1 radial profiles at eps = " << fmt(st.eps) << "\n"
      << "# columns: node mode radius value\n"
      << "# mode 0: w1 radial part; mode 2: factor multiplying theta^T Q theta\n";
  const auto& w = *st.w1;
  for (std::size_t n = 0; n < w.nodes.size(); ++n)
    for (int mode : {0, 2}) {
      const auto& v = mode == 0 ? w.nodes[n].m0 : w.nodes[n].m2;
      for (std::size_t i = 0; i < v.size(); ++i)
        out << n << " " << mode << " " << fmt(w.grid[i]) << " " << fmt(v[i]) << "\n";
    }
}

void cmd_construct(const RunConfig& cfg, const fs::path& dir, json& s) {
  const auto g = geometry_of(cfg);
  const auto& m = g.model;
  const auto c = compute_constants(cfg.N, default_constants_grid());
  const auto opt = construction_options(cfg);

  Csv res(dir / "residuals.csv", {"eps", "v0", "v1", "w1_norm_ratio", "w1_constraint_residual"});
  std::vector<double> le, l0, l1;
  bool below = true;
  json per = json::array();
  for (std::size_t q = 0; q < cfg.eps.size(); ++q) {
    const double e = cfg.eps[q];
    const auto st = build_state(m, e, Version::V1, c, opt);
    const double r0 = residual(st, m, Version::V0).norm, r1 = residual(st, m, Version::V1).norm;
    res.row({e, r0, r1, st.w1_norm_ratio, st.w1_constraint_residual});
    per.push_back({{"eps", e}, {"v0", r0}, {"v1", r1}, {"w1_norm_ratio", st.w1_norm_ratio}});
    le.push_back(std::log(e));
    l0.push_back(std::log(r0));
    l1.push_back(std::log(r1));
    below = below && r1 < r0;
    if (q == 0) {
      auto header = coord_names(m);
      for (const char* h : {"h", "H", "mu0", "mu1"}) header.emplace_back(h);
      for (int i = 0; i < cfg.N; ++i) header.push_back("Phi1_" + std::to_string(i));
      Csv f(dir / "fields.csv", header);
      for (std::size_t i = 0; i < m.size(); ++i) {
        auto row = coords(m, i);
        row.insert(row.end(), {m.h[i], st.H[i], st.mu0[i], st.mu1[i]});
        for (int a = 0; a < cfg.N; ++a) row.push_back(st.Phi1[i * cfg.N + a]);
        f.row(row);
      }
      write_w1_profiles(dir / "w1_profiles.txt", st);
      s["build_state"] = {{"phi1_solved", st.phi1_solved}, {"phi1_note", st.phi1_note}, {"alpha_eps", st.alpha_eps}};
    }
  }
  json slope;
  if (cfg.eps.size() >= 2) {
    slope["v0"] = least_squares_slope(le, l0);
    slope["v1"] = least_squares_slope(le, l1);
  }
  write_json(dir / "slope.json", slope);
  s["residual"] = per;
  s["least_squares_slope"] = slope;
  json checks;
  checks["v1_below_v0"] = below;
  if (slope.contains("v1")) {
    const double sv = slope["v1"].get<double>();
    checks["v1_slope_in_band"] = sv >= 0.85 && sv <= 1.15;
  }
  s["checks"] = checks;
}

void cmd_scaling(const RunConfig& cfg, const fs::path& dir, json& s) {
  const auto g = geometry_of(cfg);
  const auto c = compute_constants(cfg.N, default_constants_grid());
  const auto r = scaling_study(g.model, version_of(cfg), cfg.eps, c, construction_options(cfg));
  Csv csv(dir / "scaling.csv", {"eps", "norm"});
  for (std::size_t i = 0; i < r.eps.size(); ++i) csv.row({r.eps[i], r.norms[i]});
  s["scaling_study"] = {{"version", cfg.version}, {"eps", to_json(r.eps)}, {"norms", to_json(r.norms)},
                        {"slope", r.slope}, {"monotone", r.monotone}};
  json checks;
  checks["slope_in_band"] = r.slope >= 0.85 && r.slope <= 1.15;
  checks["monotone"] = r.monotone;
  s["checks"] = checks;
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    bad("command", "unknown command '" + command + "'");
  if (N < 5) bad("N", "must be >= 5");
  if (eps.empty()) bad("eps", "must not be empty");
  for (double e : eps)
    if (!(e > 0.0 && e < 1.0)) bad("eps", "values must lie in (0, 1)");
  if (r_out && !(*r_out > 0.0)) bad("r_out", "must be positive");
  if (intervals && *intervals < RadialGrid::kMinIntervals)
    bad("intervals", "must be >= " + std::to_string(RadialGrid::kMinIntervals));
  if (!(grading >= 1.0)) bad("grading", "must be >= 1");
  if (!(eta > 0.0)) bad("eta", "must be positive");
  if (!(tol > 0.0)) bad("tol", "must be positive");
  if (omega_sign != 1 && omega_sign != -1) bad("omega_sign", "must be +1 or -1");
  if (regime != "subcritical" && regime != "supercritical") bad("regime", "must be subcritical or supercritical");
  if (version != "v0" && version != "v1") bad("version", "must be v0 or v1");
  if (output.empty()) bad("output", "must not be empty");
  if ((command == "construct" || command == "scaling") && N < 6) bad("N", "construction needs N >= 6");
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) bad("(root)", "must be an object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command")
        c.command = v.get<std::string>();
      else if (key == "N")
        c.N = v.get<int>();
      else if (key == "geometry")
        c.geometry = v.get<std::string>();
      else if (key == "eps")
        c.eps = v.get<std::vector<double>>();
      else if (key == "r_out")
        c.r_out = v.get<double>();
      else if (key == "intervals")
        c.intervals = v.get<int>();
      else if (key == "grading")
        c.grading = v.get<double>();
      else if (key == "eta")
        c.eta = v.get<double>();
      else if (key == "tol")
        c.tol = v.get<double>();
      else if (key == "omega_sign")
        c.omega_sign = v.get<int>();
      else if (key == "regime")
        c.regime = v.get<std::string>();
      else if (key == "version")
        c.version = v.get<std::string>();
      else if (key == "output")
        c.output = v.get<std::string>();
      else if (key != "$comment")
        bad(key, "unknown field");
    } catch (const json::type_error&) {
      bad(key, "wrong type");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    log << "usage error: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    log << "cannot create output directory " << dir << ": " << ec.message() << "\n";
    return 1;
  }

  json s;
  s["command"] = cfg.command;
  s["config"] = config_json(cfg);
  int status = 0;
  try {
    if (cfg.command == "constants")
      cmd_constants(cfg, dir, s);
    else if (cfg.command == "profile")
      cmd_profile(cfg, dir, s);
    else if (cfg.command == "eigenpair")
      cmd_eigenpair(cfg, dir, s);
    else if (cfg.command == "attractive-solve")
      cmd_attractive(cfg, dir, s);
    else if (cfg.command == "repulsive-solve")
      cmd_repulsive(cfg, dir, s);
    else if (cfg.command == "jacobi")
      cmd_jacobi(cfg, dir, s);
    else if (cfg.command == "construct")
      cmd_construct(cfg, dir, s);
    else
      cmd_scaling(cfg, dir, s);
    s["status"] = "ok";
    s["all_pass"] = all_true(s["checks"]);
  } catch (const Error& e) {
    const bool usage = e.kind() == ErrorKind::InvalidArgument &&
                       std::string_view(e.what()).find("config.") != std::string_view::npos;
    status = usage ? 2 : 1;
    s["status"] = "error";
    s["error_kind"] = std::string(to_string(e.kind()));
    if (!s.contains("reason")) s["reason"] = e.what();
    log << (usage ? "usage error: " : "error: ") << e.what() << "\n";
  }
  write_json(dir / "summary.json", s);
  if (status == 0) log << cfg.command << ": ok, all_pass = " << (s["all_pass"].get<bool>() ? "true" : "false") << "\n";
  return status;
}

}  // namespace yamabe::cli
