// SPDX-License-Identifier: Apache-2.0
// Batch front end. Flags override keys from --config; thread count comes
// from OMP_NUM_THREADS only.
#include <iostream>

#include <CLI11.hpp>

#include "yamabe/cli.hpp"
#include "yamabe/error.hpp"

int main(int argc, char** argv) {
  using yamabe::cli::RunConfig;
  CLI::App app{"yamabe_cli: constants, profiles, reduced equations and approximate-solution residuals"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig flags;
  std::vector<double> eps;
  double r_out = 0.0;
  int intervals = 0;

  for (const auto& name : yamabe::cli::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run config (keys as the flags below)");
    sub->add_option("--N", flags.N, "normal dimension");
    sub->add_option("--geometry", flags.geometry, "geometry JSON file");
    sub->add_option("--eps", eps, "eps values")->delimiter(',');
    sub->add_option("--r-out", r_out, "outer radius of the radial grid");
    sub->add_option("--intervals", intervals, "radial grid intervals");
    sub->add_option("--grading", flags.grading, "radial grid grading exponent");
    sub->add_option("--eta", flags.eta, "truncation radius factor: R = eta / sqrt(eps)");
    sub->add_option("--tol", flags.tol, "solver tolerance");
    sub->add_option("--omega-sign", flags.omega_sign, "sign convention of the geometric potential (+1 or -1)");
    sub->add_option("--regime", flags.regime, "subcritical or supercritical");
    sub->add_option("--version", flags.version, "v0 or v1 (scaling)");
    sub->add_option("--out", flags.output, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = yamabe::cli::load_config(config_path);
  } catch (const yamabe::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  const auto* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  auto given = [&](const char* opt) { return sub->count(opt) > 0; };
  if (given("--N")) cfg.N = flags.N;
  if (given("--geometry")) cfg.geometry = flags.geometry;
  if (given("--eps")) cfg.eps = eps;
  if (given("--r-out")) cfg.r_out = r_out;
  if (given("--intervals")) cfg.intervals = intervals;
  if (given("--grading")) cfg.grading = flags.grading;
  if (given("--eta")) cfg.eta = flags.eta;
  if (given("--tol")) cfg.tol = flags.tol;
  if (given("--omega-sign")) cfg.omega_sign = flags.omega_sign;
  if (given("--regime")) cfg.regime = flags.regime;
  if (given("--version")) cfg.version = flags.version;
  if (given("--out")) cfg.output = flags.output;
  return yamabe::cli::run(cfg, std::cerr);
}
