// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/align.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support/test_support.h"

namespace flowground {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostMatrix make_costs(std::size_t rows, std::size_t cols,
                      std::vector<double> values,
                      std::vector<NodeId> ids = {}) {
  return CostMatrix(Matrix(rows, cols, std::move(values)), std::move(ids));
}

EmbeddingSequence sequence(std::size_t rows, std::size_t cols,
                           std::vector<double> values,
                           EmbeddingSequence::Kind kind) {
  return {Matrix(rows, cols, std::move(values)), kind};
}

TEST(CostMatrix, SoftmaxValues) {
  const auto steps = sequence(2, 2, {1, 0, 0, 1}, EmbeddingSequence::Kind::kStep);
  const auto clips = sequence(1, 2, {1, 0}, EmbeddingSequence::Kind::kClip);
  const CostMatrix c = compute_cost_matrix(steps, clips, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(c(0, 0), -std::log(e / (e + 1)), 1e-12);
  EXPECT_NEAR(c(1, 0), -std::log(1 / (e + 1)), 1e-12);
  EXPECT_NEAR(c(0, 0), 0.3133, 5e-5);
  EXPECT_NEAR(c(1, 0), 1.3133, 5e-5);
}

TEST(CostMatrix, StableAtSmallTemperature) {
  const auto steps = sequence(2, 2, {1, 0, 0, 1}, EmbeddingSequence::Kind::kStep);
  const auto clips = sequence(1, 2, {1, 0}, EmbeddingSequence::Kind::kClip);
  const CostMatrix c = compute_cost_matrix(steps, clips, 1e-4);
  EXPECT_NEAR(c(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(c(1, 0), 1e4, 1e-6);
}

TEST(CostMatrix, Validation) {
  const auto steps = sequence(2, 2, {1, 0, 0, 1}, EmbeddingSequence::Kind::kStep);
  const auto clips3 = sequence(1, 3, {1, 0, 0}, EmbeddingSequence::Kind::kClip);
  const auto clips = sequence(1, 2, {1, 0}, EmbeddingSequence::Kind::kClip);
  EXPECT_THROW(compute_cost_matrix(steps, clips3, 1.0), ValidationError);
  EXPECT_THROW(compute_cost_matrix(steps, clips, 0.0), ValidationError);
  EXPECT_THROW(make_costs(1, 2, {0.0, kInf}), ValidationError);
  EXPECT_THROW(make_costs(2, 1, {0.0, 1.0}, {3, 3}), ValidationError);
  EXPECT_THROW(make_costs(1, 1, {0.0}).row_of(1), ValidationError);
}

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_NEAR(percentile(v, 30), 3.7, 1e-12);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 10);
  const std::vector<double> shuffled{7, 3, 10, 1, 9, 2, 8, 4, 6, 5};
  const PercentileTerms t = percentile_terms(shuffled, 30);
  EXPECT_NEAR(t.value, 3.7, 1e-12);
  EXPECT_EQ(shuffled[t.lower], 3);
  EXPECT_EQ(shuffled[t.upper], 4);
  EXPECT_NEAR(t.upper_weight, 0.7, 1e-12);
  EXPECT_THROW(percentile(v, 0), ValidationError);
  EXPECT_THROW(percentile(std::vector<double>{}, 30), ValidationError);
}

TEST(DropCosts, Modes) {
  const CostMatrix constant = make_costs(2, 3, std::vector<double>(6, 5.0));
  EXPECT_EQ(compute_drop_costs(constant), DropCosts(3, 5.0));
  std::vector<double> values;
  for (int i = 1; i <= 10; ++i) values.push_back(i);
  const CostMatrix c = make_costs(2, 5, values);
  const DropCosts m = compute_drop_costs(c, 30);
  for (double v : m) EXPECT_NEAR(v, 3.7, 1e-12);
  // Columns hold {1,6}, {2,7}, ...
  const DropCosts col = compute_drop_costs(c, 100, DropMode::kColumn);
  EXPECT_EQ(col, (DropCosts{6, 7, 8, 9, 10}));
}

TEST(DropDtw, ForcedBlockDiagonal) {
  // 2 steps x 4 clips, step 0 cheap on clips 0-1, step 1 on clips 2-3.
  const CostMatrix c = make_costs(2, 4, {0.1, 0.2, 5, 5, 5, 5, 0.3, 0.4});
  const Alignment a = drop_dtw(std::vector<NodeId>{0, 1}, c, DropCosts(4, 100));
  EXPECT_NEAR(a.cost, 1.0, 1e-12);
  EXPECT_EQ(a.labels, (std::vector<NodeId>{0, 0, 1, 1}));
  EXPECT_TRUE(a.dropped.empty());
  EXPECT_EQ(a.segments.at(0), std::make_pair(0, 1));
  EXPECT_EQ(a.segments.at(1), std::make_pair(2, 3));
  EXPECT_EQ(a.tau_star, (std::vector<NodeId>{0, 1}));
}

TEST(DropDtw, SingleStepKeepsOneClip) {
  const CostMatrix c = make_costs(1, 4, {3, 3, 0.5, 3});
  const Alignment a = drop_dtw(std::vector<NodeId>{0}, c, DropCosts(4, 1.0));
  EXPECT_EQ(a.labels, (std::vector<NodeId>{-1, -1, 0, -1}));
  EXPECT_EQ(a.dropped, (std::vector<int>{0, 1, 3}));
  EXPECT_NEAR(a.cost, 3.5, 1e-12);
}

TEST(DropDtw, IdentityCosts) {
  const CostMatrix c = make_costs(3, 3, {0, 9, 9, 9, 0, 9, 9, 9, 0});
  const Alignment a = drop_dtw(std::vector<NodeId>{0, 1, 2}, c, DropCosts(3, 50));
  EXPECT_EQ(a.labels, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(a.cost, 0.0);
}

TEST(DropDtw, InfiniteDropForcesMatches) {
  const CostMatrix c = make_costs(1, 3, {1, 2, 3});
  const Alignment a = drop_dtw(std::vector<NodeId>{0}, c, DropCosts(3, kInf));
  EXPECT_EQ(a.labels, (std::vector<NodeId>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(a.cost, 6.0);
}

TEST(DropDtw, Preconditions) {
  const CostMatrix c = make_costs(2, 1, {0, 0});
  EXPECT_THROW(drop_dtw(std::vector<NodeId>{0, 1}, c, DropCosts(1, 1.0)),
               InfeasibleError);
  const CostMatrix c2 = make_costs(2, 2, {0, 0, 0, 0});
  EXPECT_THROW(drop_dtw(std::vector<NodeId>{0, 1}, c2, DropCosts(3, 1.0)),
               ValidationError);
  EXPECT_THROW(drop_dtw(std::vector<NodeId>{0, 0}, c2, DropCosts(2, 1.0)),
               ValidationError);
  EXPECT_THROW(drop_dtw(std::vector<NodeId>{0}, c2, DropCosts(2, 1.0)),
               ValidationError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(drop_dtw(std::vector<NodeId>{0, 1}, c2, DropCosts{1.0, nan}),
               ValidationError);
}

TEST(DropDtw, MatchesExhaustiveLabelling) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 4)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(k, 7)(rng);
    const FlowGraph g = testing::chain_graph(k);
    const CostMatrix c = testing::random_costs(rng, g, n);
    const DropCosts d = testing::random_drops(rng, n);
    std::vector<NodeId> order = g.step_ids();
    std::shuffle(order.begin(), order.end(), rng);
    const Alignment a = drop_dtw(order, c, d);
    EXPECT_NEAR(a.cost, testing::exhaustive_order_cost(order, c, d), 1e-12);
    // The reported labelling reproduces the reported cost.
    double replay = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      replay += a.labels[j] == kDropLabel ? d[j] : c(c.row_of(a.labels[j]), j);
    }
    EXPECT_NEAR(replay, a.cost, 1e-12);
    EXPECT_EQ(a.tau_star, order);
  }
}

TEST(GraphDropDtw, ReversedPairIsFound) {
  // Two independent steps a=0, b=1; clip 0 looks like b, clip 1 like a.
  const FlowGraph g = model_problem(ThreadSpec({1, 1}));
  const CostMatrix c = make_costs(2, 2, {5, 0.1, 0.1, 5});
  const Alignment a = graph_drop_dtw(build_tsort_forward(g), c, DropCosts(2, 10));
  EXPECT_EQ(a.tau_star, (std::vector<NodeId>{1, 0}));
  EXPECT_EQ(a.labels, (std::vector<NodeId>{1, 0}));
  EXPECT_NEAR(a.cost, 0.2, 1e-12);
}

TEST(GraphDropDtw, ChainMatchesDropDtw) {
  const FlowGraph g = model_problem(ThreadSpec({2, 1}));
  std::mt19937_64 rng(9);
  const CostMatrix c = testing::random_costs(rng, g, 6);
  const DropCosts d = testing::random_drops(rng, 6);
  const std::vector<NodeId> order{0, 1, 2};
  const Alignment a = drop_dtw(order, c, d);
  const Alignment b =
      graph_drop_dtw(build_tsort_forward(linear_graph(g, order)), c, d);
  EXPECT_DOUBLE_EQ(a.cost, b.cost);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(GraphDropDtw, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    const FlowGraph g = testing::random_dag(rng, 5);
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(g.num_steps(), 7)(rng);
    const CostMatrix c = testing::random_costs(rng, g, n);
    const DropCosts d = testing::random_drops(rng, n);
    for (auto algo : {TSortAlgorithm::kForward, TSortAlgorithm::kBackward}) {
      const Alignment a = graph_drop_dtw(build_tsort(g, algo), c, d);
      EXPECT_NEAR(a.cost, testing::exhaustive_graph_cost(g, c, d), 1e-12);
      EXPECT_TRUE(is_topological_sort(g, a.tau_star));
      EXPECT_EQ(a.tau_star.size(), g.num_steps());
    }
  }
}

TEST(Segmentation, Labels) {
  Alignment a;
  a.segments[5] = {0, 2};
  EXPECT_EQ(segmentation_labels(a, 4), (std::vector<NodeId>{5, 5, 5, -1}));
  a.dropped = {1};
  EXPECT_EQ(segmentation_labels(a, 4), (std::vector<NodeId>{5, -1, 5, -1}));
  EXPECT_EQ(segmentation_labels(Alignment{}, 3), (std::vector<NodeId>(3, -1)));
}

TEST(Segmentation, RoundTripsAlignmentLabels) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const FlowGraph g = testing::random_dag(rng, 5);
    const CostMatrix c = testing::random_costs(rng, g, 8);
    const Alignment a =
        graph_drop_dtw(build_tsort_forward(g), c, testing::random_drops(rng, 8));
    EXPECT_EQ(segmentation_labels(a, 8), a.labels);
  }
}

}  // namespace
}  // namespace flowground
