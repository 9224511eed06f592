// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FLOWGROUND_BRUTE_FORCE_H_
#define FLOWGROUND_BRUTE_FORCE_H_

#include <cstddef>
#include <optional>

#include "flowground/align.h"
#include "flowground/flow_graph.h"
#include "flowground/tsort_graph.h"

namespace flowground {

// Runs drop_dtw on every topological sort of g and keeps the cheapest
// alignment; ties go to the lexicographically smallest sort.
Alignment brute_force_ground(const FlowGraph& g, const CostMatrix& c,
                             const DropCosts& d,
                             std::size_t cap = kDefaultSortCap);

struct BenchReport {
  std::size_t n_sorts = 0;
  std::size_t n_tsort_nodes = 0;  // TSortGraph::num_states()
  std::size_t repeats = 0;
  double t_brute_ms = 0.0;  // median
  double t_graph_ms = 0.0;  // median, meta-graph construction included
  double speedup = 0.0;
  double rho_predicted = 0.0;
  // Costs of the two methods on the last run; equal up to rounding.
  double brute_cost = 0.0;
  double graph_cost = 0.0;
};

// Median wall-clock time of brute force vs. meta-graph construction plus
// Graph-Drop-DTW, after one untimed warm-up run of each.
BenchReport bench_compare(const FlowGraph& g, const CostMatrix& c,
                          const DropCosts& d, std::size_t repeats,
                          TSortAlgorithm algorithm = TSortAlgorithm::kForward);

// Model-problem closed form when g is a set of chains, otherwise
// N_sorts * n / (T * |V_S|) with T the largest in-degree of the meta-graph.
double predicted_speedup(const FlowGraph& g, std::size_t n_sorts,
                         const TSortGraph& s);

}  // namespace flowground

#endif  // FLOWGROUND_BRUTE_FORCE_H_
