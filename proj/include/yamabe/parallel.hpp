// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace yamabe {

/// Serial is the reference path; Parallel runs independent iterations under
/// OpenMP. Both write into per-index slots, so results are bit-identical.
enum class Execution { Serial, Parallel };

/// Calls fn(i) for i in [0, n). The first exception (by index) is rethrown
/// after the loop, so failures do not depend on thread scheduling.
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace yamabe
