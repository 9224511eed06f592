// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/brute_force.h"

#include <gtest/gtest.h>

#include <random>

#include "support/test_support.h"

namespace flowground {
namespace {

TEST(BruteForce, ChainEqualsDropDtw) {
  std::mt19937_64 rng(1);
  const FlowGraph g = normalize(testing::chain_graph(3));
  const CostMatrix c = testing::random_costs(rng, g, 6);
  const DropCosts d = testing::random_drops(rng, 6);
  const Alignment a = brute_force_ground(g, c, d);
  const Alignment b = drop_dtw(std::vector<NodeId>{0, 1, 2}, c, d);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(BruteForce, PicksReversedSort) {
  const FlowGraph g = model_problem(ThreadSpec({1, 1}));
  const CostMatrix c(Matrix(2, 2, {5, 0.1, 0.1, 5}), {});
  EXPECT_EQ(brute_force_ground(g, c, DropCosts(2, 10)).tau_star,
            (std::vector<NodeId>{1, 0}));
}

TEST(BruteForce, TiesGoToTheSmallestSort) {
  const FlowGraph g = model_problem(ThreadSpec({1, 1}));
  const CostMatrix c(Matrix(2, 2, std::vector<double>(4, 1.0)), {});
  EXPECT_EQ(brute_force_ground(g, c, DropCosts(2, 10)).tau_star,
            (std::vector<NodeId>{0, 1}));
}

TEST(BruteForce, AgreesWithGraphGrounding) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const FlowGraph g = testing::random_dag(rng, 6);
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(g.num_steps(), 10)(rng);
    const CostMatrix c = testing::random_costs(rng, g, n);
    const DropCosts d = testing::random_drops(rng, n);
    const Alignment brute = brute_force_ground(g, c, d);
    const Alignment graph = graph_drop_dtw(build_tsort_forward(g), c, d);
    EXPECT_NEAR(brute.cost, graph.cost, 1e-9);
    EXPECT_EQ(brute.tau_star, graph.tau_star);
    EXPECT_EQ(brute.labels, graph.labels);
  }
}

TEST(BruteForce, SortCap) {
  std::mt19937_64 rng(2);
  const FlowGraph g = model_problem(ThreadSpec({2, 2}));
  const CostMatrix c = testing::random_costs(rng, g, 5);
  EXPECT_THROW(brute_force_ground(g, c, DropCosts(5, 1.0), 3), CapExceededError);
}

TEST(Bench, ReportIsConsistent) {
  std::mt19937_64 rng(3);
  const FlowGraph g = model_problem(ThreadSpec({2, 2}));
  const CostMatrix c = testing::random_costs(rng, g, 20);
  const DropCosts d = compute_drop_costs(c);
  const BenchReport r = bench_compare(g, c, d, 3);
  EXPECT_EQ(r.n_sorts, 6u);
  EXPECT_EQ(r.n_tsort_nodes, 13u);
  EXPECT_EQ(r.repeats, 3u);
  EXPECT_NEAR(r.brute_cost, r.graph_cost, 1e-9);
  EXPECT_NEAR(r.rho_predicted, complexity_ratio(ThreadSpec({2, 2})), 1e-12);
  EXPECT_GT(r.t_brute_ms, 0.0);
  EXPECT_GT(r.t_graph_ms, 0.0);
  EXPECT_THROW(bench_compare(g, c, d, 0), ValidationError);
}

TEST(Bench, PredictedSpeedupForGeneralGraphs) {
  const FlowGraph g = normalize(testing::two_branch_graph());
  const TSortGraph s = build_tsort_forward(g);
  const double expected = 3.0 * 5.0 /
                          (static_cast<double>(s.max_in_degree()) *
                           static_cast<double>(s.num_states()));
  EXPECT_NEAR(predicted_speedup(g, 3, s), expected, 1e-12);
}

}  // namespace
}  // namespace flowground
