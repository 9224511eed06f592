// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/brute_force.h"

#include <algorithm>
#include <chrono>
#include <limits>

namespace flowground {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

Alignment brute_force_ground(const FlowGraph& g, const CostMatrix& c,
                             const DropCosts& d, std::size_t cap) {
  Alignment best;
  best.cost = std::numeric_limits<double>::infinity();
  bool found = false;
  // Sorts arrive in lexicographic order, so keeping the first strict
  // minimum breaks ties toward the smallest sort.
  for_each_topological_sort(
      g,
      [&](std::span<const NodeId> sort) {
        Alignment a = drop_dtw(sort, c, d);
        if (!found || a.cost < best.cost) {
          best = std::move(a);
          found = true;
        }
        return true;
      },
      cap);
  if (!found) throw InfeasibleError("flow graph has no topological sort");
  return best;
}

double predicted_speedup(const FlowGraph& g, std::size_t n_sorts,
                         const TSortGraph& s) {
  if (auto spec = as_model_problem(g)) return complexity_ratio(*spec);
  const double threads = static_cast<double>(std::max<std::size_t>(
      1, s.max_in_degree()));
  return static_cast<double>(n_sorts) * static_cast<double>(g.num_steps()) /
         (threads * static_cast<double>(s.num_states()));
}

BenchReport bench_compare(const FlowGraph& g, const CostMatrix& c,
                          const DropCosts& d, std::size_t repeats,
                          TSortAlgorithm algorithm) {
  if (repeats == 0) throw ValidationError("bench needs at least one repeat");
  BenchReport r;
  r.repeats = repeats;

  // Warm-up runs, also used for the counts.
  r.brute_cost = brute_force_ground(g, c, d).cost;
  {
    const TSortGraph s = build_tsort(g, algorithm);
    r.graph_cost = graph_drop_dtw(s, c, d).cost;
    r.n_tsort_nodes = s.num_states();
    for_each_topological_sort(g, [&](std::span<const NodeId>) {
      ++r.n_sorts;
      return true;
    });
    r.rho_predicted = predicted_speedup(g, r.n_sorts, s);
  }

  std::vector<double> brute_ms, graph_ms;
  brute_ms.reserve(repeats);
  graph_ms.reserve(repeats);
  for (std::size_t k = 0; k < repeats; ++k) {
    auto start = Clock::now();
    r.brute_cost = brute_force_ground(g, c, d).cost;
    brute_ms.push_back(elapsed_ms(start));

    start = Clock::now();
    const TSortGraph s = build_tsort(g, algorithm);
    r.graph_cost = graph_drop_dtw(s, c, d).cost;
    graph_ms.push_back(elapsed_ms(start));
  }
  r.t_brute_ms = median(std::move(brute_ms));
  r.t_graph_ms = median(std::move(graph_ms));
  r.speedup = r.t_graph_ms > 0.0 ? r.t_brute_ms / r.t_graph_ms
                                 : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace flowground
