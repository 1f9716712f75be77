// SPDX-License-Identifier: Apache-2.0
// Serial reference versus OpenMP for the per-node kernels of the
// construction: the w1 linear solves and the residual evaluation.
#include <numbers>

#include <benchmark/benchmark.h>

#include "yamabe/construction.hpp"

using namespace yamabe;

namespace {

struct Fixture {
  SubmanifoldModel model = SubmanifoldModel::circle(2.0 * std::numbers::pi, 64, 7);
  ProjectionConstants constants = compute_constants(7, default_constants_grid());
  ConstructionState state;

  Fixture() {
    model.h.resize(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) model.h[i] = 2.0 + 0.3 * std::cos(model.coordinate(i, 0));
    ConstructionOptions o;
    o.intervals = 1024;
    state = build_state(model, 1e-2, Version::V1, constants, o);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_LinearSolve(benchmark::State& s) {
  const auto& f = fixture();
  const auto exec = s.range(0) ? Execution::Parallel : Execution::Serial;
  ModeField rhs = f.state.H1;
  std::vector<double> a(f.model.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.state.mu0[i] * f.state.mu0[i] * f.model.h[i];
  LinearSolveOptions o;
  o.spec = {5, 0.5, f.state.eps};
  o.orth_rel = 1.0;
  o.exec = exec;
  for (auto _ : s) benchmark::DoNotOptimize(linear_solve(a, rhs, o).norm_ratio);
  s.SetLabel(s.range(0) ? "parallel" : "serial");
}

void BM_Residual(benchmark::State& s) {
  const auto& f = fixture();
  const auto exec = s.range(0) ? Execution::Parallel : Execution::Serial;
  for (auto _ : s) benchmark::DoNotOptimize(residual(f.state, f.model, Version::V1, exec).norm);
  s.SetLabel(s.range(0) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_LinearSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Residual)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
