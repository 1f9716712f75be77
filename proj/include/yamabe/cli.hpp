// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace yamabe::cli {

/// One batch run. Unset optionals take per-command defaults (see README).
struct RunConfig {
  std::string command;
  int N = 7;
  std::string geometry;
  std::vector<double> eps{1e-2, 5e-3, 2e-3, 1e-3};
  std::optional<double> r_out;
  std::optional<int> intervals;
  double grading = 2.0;
  double eta = 1.0;
  double tol = 1e-12;
  int omega_sign = +1;
  std::string regime = "subcritical";
  std::string version = "v1";
  std::string output = "out";

  /// Throws Error(InvalidArgument) naming the offending field.
  void validate() const;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"constants",       "profile", "eigenpair", "attractive-solve",
                                          "repulsive-solve", "jacobi",  "construct", "scaling"};
  return c;
}

/// Reads a JSON config file; keys mirror the RunConfig fields.
[[nodiscard]] RunConfig load_config(const std::string& path);
/// Overlays the keys present in a JSON object onto `base`.
[[nodiscard]] RunConfig config_from_json(const std::string& text, RunConfig base = {});

/// Exit status: 0 on success (pass flags are reported, not enforced),
/// 1 when a solver or precondition fails, 2 for an invalid config.
/// summary.json is written in every case where the output directory exists.
int run(const RunConfig& config, std::ostream& log);

}  // namespace yamabe::cli
