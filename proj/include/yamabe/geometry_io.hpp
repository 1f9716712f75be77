// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yamabe/manifold.hpp"

namespace yamabe {

/// A model K read from a geometry file, with optional coefficient fields for
/// the singular problems. See data/README.md for the schema.
struct GeometryFile {
  SubmanifoldModel model;
  std::optional<std::vector<double>> alpha;
  std::optional<std::vector<double>> beta;
};

/// Parses geometry JSON text. N is the normal dimension; a file that names a
/// different "N" is rejected. Errors carry the offending field name.
[[nodiscard]] GeometryFile parse_geometry(std::string_view text, int N);
[[nodiscard]] GeometryFile load_geometry(const std::string& path, int N);

}  // namespace yamabe
