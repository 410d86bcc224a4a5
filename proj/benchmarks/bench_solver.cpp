// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "porohdg/forms.hpp"
#include "porohdg/mms.hpp"
#include "porohdg/system.hpp"
#include "porohdg/timeloop.hpp"

using namespace porohdg;

namespace {

struct Setup {
  BenchmarkCase bc = quasistatic_case();
  Mesh mesh;
  ModelParams params;
  DofLayout layout;

  Setup(int n, int k, Variant variant) {
    mesh = bc.mesh_at_size(n, n);
    params = bc.params;
    params.k = k;
    layout = build_layout(mesh, k, variant);
  }
};

}  // namespace

static void BM_element_assembly(benchmark::State& state) {
  const Setup s(16, static_cast<int>(state.range(0)), Variant::hdg);
  const ReferenceTables tab(s.layout);
  for (auto _ : state) {
    for (int c = 0; c < s.mesh.n_cells(); ++c) {
      const ElementContext ctx = build_element_context(s.mesh, tab, c);
      const CellTraceU tr = build_cell_trace_u(s.mesh, s.layout, c);
      benchmark::DoNotOptimize(assemble_ah_local(ctx, s.params, tr));
      benchmark::DoNotOptimize(assemble_bh_local(ctx, tr));
    }
  }
  state.SetItemsProcessed(state.iterations() * s.mesh.n_cells());
}
BENCHMARK(BM_element_assembly)->Arg(1)->Arg(2)->Arg(3);

static void BM_condensation(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2, Variant::hdg);
  for (auto _ : state) {
    CondensedSystem sys(s.mesh, s.layout, s.params, SchemeWeights::backward_euler(1e-3));
    benchmark::DoNotOptimize(sys.n_facet_unknowns());
  }
}
BENCHMARK(BM_condensation)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_time_step(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)), 2, Variant::hdg);
  const CondensedSystem sys(s.mesh, s.layout, s.params,
                            SchemeWeights::backward_euler(1e-3));
  const SolutionState init = initialize(s.mesh, s.layout, s.params, &*s.bc.exact);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sys.solve_step(s.bc.data, 1e-3, &init));
  }
}
BENCHMARK(BM_time_step)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_uniform_refine(benchmark::State& state) {
  const Mesh mesh = build_structured_square(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(uniform_refine(mesh));
  }
}
BENCHMARK(BM_uniform_refine)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
