// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent reference implementations for tests.

#ifndef FLOWGROUND_TESTS_SUPPORT_TEST_SUPPORT_H_
#define FLOWGROUND_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "flowground/align.h"
#include "flowground/flow_graph.h"
#include "flowground/synth.h"

namespace flowground::testing {

inline FlowGraph chain_graph(int n) {
  std::vector<StepNode> nodes;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({i, "s" + std::to_string(i), false});
    if (i > 0) edges.push_back({i - 1, i});
  }
  return FlowGraph(std::move(nodes), std::move(edges));
}

// Five steps: 0->1->2->4 and 0->3->4. Three sorts.
inline FlowGraph two_branch_graph() {
  std::vector<StepNode> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back({i, "n" + std::to_string(i + 1), false});
  return FlowGraph(std::move(nodes), {{0, 1}, {1, 2}, {0, 3}, {2, 4}, {3, 4}});
}

inline FlowGraph random_dag(std::mt19937_64& rng, int max_steps) {
  const int n = std::uniform_int_distribution<int>(1, max_steps)(rng);
  const double p = std::uniform_real_distribution<double>(0.0, 0.8)(rng);
  return random_flow_graph(n, p, rng);
}

inline CostMatrix random_costs(std::mt19937_64& rng, const FlowGraph& g,
                               std::size_t clips) {
  const auto ids = g.step_ids();
  Matrix m(ids.size(), clips);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : m.flat()) v = u(rng);
  return CostMatrix(std::move(m), ids);
}

inline DropCosts random_drops(std::mt19937_64& rng, std::size_t clips) {
  DropCosts d(clips);
  std::uniform_real_distribution<double> u(0.1, 1.2);
  for (double& v : d) v = u(rng);
  return d;
}

// Every permutation of the steps that respects the edges, found by
// filtering all permutations.
inline std::set<std::vector<NodeId>> permutation_sorts(const FlowGraph& g) {
  std::vector<NodeId> perm = g.step_ids();
  std::set<std::vector<NodeId>> out;
  do {
    std::vector<int> pos(g.size(), -1);
    for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = static_cast<int>(i);
    bool ok = true;
    for (const auto& [u, v] : g.edges()) {
      if (pos[u] >= 0 && pos[v] >= 0 && pos[u] > pos[v]) ok = false;
    }
    if (ok) out.insert(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Minimum Drop-DTW cost for a fixed order by exhaustive labelling: every clip
// is dropped or matched, matched positions never move backwards in `order`,
// and every step gets at least one clip.
inline double exhaustive_order_cost(const std::vector<NodeId>& order,
                                    const CostMatrix& c, const DropCosts& d) {
  const std::size_t n = c.clips();
  const std::size_t k = order.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pos(n, -1);  // index into order, -1 for drop
  std::function<void(std::size_t, int, double, std::size_t)> rec =
      [&](std::size_t j, int last, double cost, std::size_t covered) {
        if (cost >= best) return;
        if (j == n) {
          if (covered == k) best = cost;
          return;
        }
        rec(j + 1, last, cost + d[j], covered);
        const int lo = std::max(last, 0);
        for (int p = lo; p < static_cast<int>(k) && p <= last + 1; ++p) {
          const std::size_t cov = covered + (p != last ? 1 : 0);
          rec(j + 1, p, cost + c(c.row_of(order[p]), j), cov);
        }
      };
  rec(0, -1, 0.0, 0);
  return best;
}

inline double exhaustive_graph_cost(const FlowGraph& g, const CostMatrix& c,
                                    const DropCosts& d) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& order : permutation_sorts(g)) {
    best = std::min(best, exhaustive_order_cost(order, c, d));
  }
  return best;
}

// Error of an analytic derivative against a finite-difference estimate,
// relative to the estimate and absolute below `floor`.
inline double gradient_error(double analytic, double numeric,
                             double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max(std::abs(numeric), floor);
}

}  // namespace flowground::testing

#endif  // FLOWGROUND_TESTS_SUPPORT_TEST_SUPPORT_H_
