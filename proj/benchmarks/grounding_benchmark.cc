// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Model problems with T threads of n steps each, N = 200 clips.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "flowground/align.h"
#include "flowground/brute_force.h"
#include "flowground/flow_graph.h"
#include "flowground/tsort_graph.h"

namespace flowground {
namespace {

constexpr std::size_t kClips = 200;

ThreadSpec spec_of(const benchmark::State& state) {
  return ThreadSpec(std::vector<int>(static_cast<std::size_t>(state.range(0)),
                                     static_cast<int>(state.range(1))));
}

struct Problem {
  FlowGraph graph;
  CostMatrix costs;
  DropCosts drops;
};

Problem make_problem(const ThreadSpec& spec) {
  Problem p{normalize(model_problem(spec)), {}, {}};
  const auto ids = p.graph.step_ids();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(ids.size(), kClips);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = u(rng);
  }
  p.costs = CostMatrix(std::move(m), ids);
  p.drops = compute_drop_costs(p.costs);
  return p;
}

void BM_BuildTSort(benchmark::State& state) {
  const FlowGraph g = normalize(model_problem(spec_of(state)));
  const auto algo = state.range(2) ? TSortAlgorithm::kBackward : TSortAlgorithm::kForward;
  for (auto _ : state) benchmark::DoNotOptimize(build_tsort(g, algo));
}
BENCHMARK(BM_BuildTSort)
    ->ArgsProduct({{2, 3}, {3, 6, 9}, {0, 1}})
    ->ArgNames({"T", "n", "backward"});

void BM_GraphDropDtw(benchmark::State& state) {
  const Problem p = make_problem(spec_of(state));
  const TSortGraph s = build_tsort(p.graph, TSortAlgorithm::kForward);
  for (auto _ : state) benchmark::DoNotOptimize(graph_drop_dtw(s, p.costs, p.drops));
  state.counters["states"] = static_cast<double>(s.num_states());
}
BENCHMARK(BM_GraphDropDtw)
    ->ArgsProduct({{2, 3}, {3, 6}})
    ->ArgNames({"T", "n"})
    ->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const Problem p = make_problem(spec_of(state));
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_ground(p.graph, p.costs, p.drops));
  }
}
BENCHMARK(BM_BruteForce)
    ->Args({2, 3})
    ->Args({3, 3})
    ->Args({2, 6})
    ->ArgNames({"T", "n"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace flowground

BENCHMARK_MAIN();
