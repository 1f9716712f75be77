// SPDX-License-Identifier: Apache-2.0
#include "yamabe/error.hpp"

namespace yamabe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidField: return "invalid-field";
    case ErrorKind::ModeOutOfRange: return "mode-out-of-range";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::ContractViolation: return "contract-violation";
    case ErrorKind::SpectralFailure: return "spectral-failure";
    case ErrorKind::ComputationFailed: return "computation-failed";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::PositivityViolation: return "positivity-violation";
    case ErrorKind::NoSolutionFound: return "no-solution-found";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::State: return "state";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace yamabe
