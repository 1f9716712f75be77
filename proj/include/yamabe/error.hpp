// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace yamabe {

enum class ErrorKind {
  InvalidArgument,
  InvalidField,
  ModeOutOfRange,
  Domain,
  ContractViolation,
  SpectralFailure,
  ComputationFailed,
  Precondition,
  SolverFailure,
  PositivityViolation,
  NoSolutionFound,
  Degeneracy,
  State,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI summary) can report it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define YAMABE_REQUIRE(cond, kind, msg)           \
  do {                                            \
    if (!(cond)) throw ::yamabe::Error((kind), (msg)); \
  } while (false)

}  // namespace yamabe
