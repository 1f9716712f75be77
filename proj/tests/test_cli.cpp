// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "yamabe/cli.hpp"
#include "yamabe/error.hpp"
#include "yamabe/geometry_io.hpp"

using namespace yamabe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("yamabe_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Geometry, TrigonometricField) {
  const auto g = parse_geometry(R"({"kind": "circle", "lengths": [6.283185307179586], "counts": [64],
                                    "h": {"constant": 1.0, "cos": [{"amp": 0.3, "k": [1]}]}})",
                                7);
  ASSERT_EQ(g.model.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(g.model.h[i], 1.0 + 0.3 * std::cos(g.model.coordinate(i, 0)), 1e-14);
  EXPECT_FALSE(g.alpha.has_value());
}

TEST(Geometry, CurvatureEntriesAndDefaults) {
  const auto g = parse_geometry(R"({"kind": "circle", "lengths": [6.283185307179586], "counts": [32],
                                    "R_mixed": [{"index": [2, 0, 0, 2], "value": 1.5}]})",
                                7);
  EXPECT_EQ(g.model.curvature.mixed(5, 2, 0, 0, 2), 1.5);
  EXPECT_EQ(g.model.curvature.mixed(5, 1, 0, 0, 1), 0.0);
  EXPECT_EQ(g.model.h, std::vector<double>(32, 0.0));
}

TEST(Geometry, FieldLevelErrors) {
  EXPECT_NE(message_of([] { (void)parse_geometry(R"({"kind": "sphere"})", 7); }).find("geometry.kind"),
            std::string::npos);
  EXPECT_NE(message_of([] {
              (void)parse_geometry(R"({"kind": "circle", "lengths": [1.0], "counts": [32], "h": [1, 2]})", 7);
            }).find("geometry.h"),
            std::string::npos);
  EXPECT_NE(message_of([] {
              (void)parse_geometry(R"({"kind": "circle", "lengths": [1.0], "counts": [32], "N": 8})", 7);
            }).find("geometry.N"),
            std::string::npos);
  EXPECT_NE(message_of([] {
              (void)parse_geometry(R"({"kind": "circle", "lengths": [1.0], "counts": [32], "colour": 1})", 7);
            }).find("geometry.colour"),
            std::string::npos);
  EXPECT_THROW((void)parse_geometry("{not json", 7), Error);
}

TEST(Config, ValidationNamesField) {
  cli::RunConfig c;
  c.command = "constants";
  EXPECT_NO_THROW(c.validate());
  c.N = 4;
  EXPECT_NE(message_of([&] { c.validate(); }).find("config.N"), std::string::npos);
  c.N = 7;
  c.eps = {0.5, 1.5};
  EXPECT_NE(message_of([&] { c.validate(); }).find("config.eps"), std::string::npos);
  c.eps = {0.01};
  c.tol = 0.0;
  EXPECT_NE(message_of([&] { c.validate(); }).find("config.tol"), std::string::npos);
  c.tol = 1e-12;
  c.command = "plot";
  EXPECT_NE(message_of([&] { c.validate(); }).find("config.command"), std::string::npos);
}

TEST(Config, JsonOverlay) {
  const auto c = cli::config_from_json(R"({"command": "scaling", "eps": [0.01, 0.001], "omega_sign": -1,
                                           "intervals": 512})");
  EXPECT_EQ(c.command, "scaling");
  EXPECT_EQ(c.eps, (std::vector<double>{0.01, 0.001}));
  EXPECT_EQ(c.omega_sign, -1);
  EXPECT_EQ(c.intervals, 512);
  EXPECT_EQ(c.N, 7);
  EXPECT_THROW((void)cli::config_from_json(R"({"N": "seven"})"), Error);
  EXPECT_THROW((void)cli::config_from_json(R"({"nn": 7})"), Error);
}

TEST(Run, InvalidConfigIsUsageError) {
  cli::RunConfig c;
  c.command = "constants";
  c.N = 3;
  std::ostringstream log;
  EXPECT_EQ(cli::run(c, log), 2);
  EXPECT_NE(log.str().find("config.N"), std::string::npos);
}

TEST(Run, ConstantsRowAndFlags) {
  cli::RunConfig c;
  c.command = "constants";
  c.output = scratch("constants").string();
  std::ostringstream log;
  ASSERT_EQ(cli::run(c, log), 0);
  const auto csv = slurp(fs::path(c.output) / "constants.csv");
  EXPECT_EQ(csv.substr(0, 6), "N,c1,c");
  const auto summary = slurp(fs::path(c.output) / "summary.json");
  EXPECT_NE(summary.find("\"ratio_a\": true"), std::string::npos);
  EXPECT_NE(summary.find("\"ratio_c2\": true"), std::string::npos);
  EXPECT_NE(summary.find("\"status\": \"ok\""), std::string::npos);
  fs::remove_all(c.output);
}

TEST(Run, RepulsiveWithPositiveAlphaFails) {
  cli::RunConfig c;
  c.command = "repulsive-solve";
  c.geometry = std::string(YAMABE_DATA_DIR) + "/repulsive_positive_alpha.json";
  c.output = scratch("repulsive").string();
  std::ostringstream log;
  EXPECT_EQ(cli::run(c, log), 1);
  const auto summary = slurp(fs::path(c.output) / "summary.json");
  EXPECT_NE(summary.find("\"reason\": \"min alpha >= 0\""), std::string::npos);
  EXPECT_NE(summary.find("\"status\": \"error\""), std::string::npos);
  fs::remove_all(c.output);
}

TEST(Run, ByteIdenticalReruns) {
  cli::RunConfig c;
  c.command = "attractive-solve";
  c.geometry = std::string(YAMABE_DATA_DIR) + "/attractive_bump.json";
  std::ostringstream log;
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  c.output = a.string();
  ASSERT_EQ(cli::run(c, log), 0);
  c.output = b.string();
  ASSERT_EQ(cli::run(c, log), 0);
  for (const char* name : {"summary.json", "solution.csv"}) EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  fs::remove_all(a);
  fs::remove_all(b);
}
