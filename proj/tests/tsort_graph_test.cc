// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/tsort_graph.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/test_support.h"

namespace flowground {
namespace {

using Paths = std::set<std::vector<NodeId>>;

Paths path_set(const TSortGraph& s) {
  const auto paths = enumerate_paths(s);
  return Paths(paths.begin(), paths.end());
}

class BothAlgorithms : public ::testing::TestWithParam<TSortAlgorithm> {};

TEST_P(BothAlgorithms, ChainIsAChain) {
  const TSortGraph s = build_tsort(normalize(testing::chain_graph(4)), GetParam());
  EXPECT_EQ(s.num_states(), 5u);
  EXPECT_EQ(s.num_edges(), 5u);
  EXPECT_EQ(path_set(s), (Paths{{0, 1, 2, 3}}));
}

TEST_P(BothAlgorithms, TwoBranchPaths) {
  const TSortGraph s = build_tsort(normalize(testing::two_branch_graph()), GetParam());
  EXPECT_EQ(path_set(s),
            (Paths{{0, 1, 2, 3, 4}, {0, 1, 3, 2, 4}, {0, 3, 1, 2, 4}}));
}

TEST_P(BothAlgorithms, ModelProblemStateCounts) {
  for (const auto& sizes : std::vector<std::vector<int>>{
           {1, 1}, {2, 2}, {3, 3, 3}, {4}, {2, 1, 3}}) {
    const ThreadSpec spec(sizes);
    const TSortGraph s = build_tsort(model_problem(spec), GetParam());
    EXPECT_EQ(BigInt(s.num_states()), count_tsort_nodes_closed_form(spec));
  }
}

TEST_P(BothAlgorithms, TwoIndependentSteps) {
  const TSortGraph s =
      build_tsort(model_problem(ThreadSpec({1, 1})), GetParam());
  EXPECT_EQ(s.size(), 6u);
  EXPECT_EQ(path_set(s), (Paths{{0, 1}, {1, 0}}));
}

TEST_P(BothAlgorithms, NodesAreTopologicallyIndexed) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const TSortGraph s = build_tsort(testing::random_dag(rng, 7), GetParam());
    for (const auto& [u, v] : s.edges()) EXPECT_LT(u, v);
    EXPECT_EQ(s.predecessors(s.root()).size(), 0u);
    EXPECT_EQ(s.successors(s.sink()).size(), 0u);
  }
}

TEST_P(BothAlgorithms, PathsAreTheSortsOnRandomDags) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const FlowGraph g = testing::random_dag(rng, 7);
    const TSortGraph s = build_tsort(g, GetParam());
    const auto paths = enumerate_paths(s);
    const Paths unique(paths.begin(), paths.end());
    EXPECT_EQ(unique.size(), paths.size()) << "duplicate paths";
    EXPECT_EQ(unique, testing::permutation_sorts(g));
  }
}

TEST_P(BothAlgorithms, NodeCapIsEnforced) {
  EXPECT_THROW(build_tsort(model_problem(ThreadSpec({3, 3, 3})), GetParam(),
                           TSortOptions{50}),
               CapExceededError);
}

INSTANTIATE_TEST_SUITE_P(Algorithms, BothAlgorithms,
                         ::testing::Values(TSortAlgorithm::kForward,
                                           TSortAlgorithm::kBackward));

TEST(TSortGraph, RequiresNormalizedInput) {
  EXPECT_THROW(build_tsort_forward(testing::chain_graph(3)), ValidationError);
  EXPECT_THROW(build_tsort_backward(testing::chain_graph(3)), ValidationError);
}

TEST(TSortGraph, ForwardAndBackwardAreIsomorphic) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const FlowGraph g = testing::random_dag(rng, 8);
    EXPECT_TRUE(isomorphic(build_tsort_forward(g), build_tsort_backward(g)));
  }
  EXPECT_FALSE(isomorphic(build_tsort_forward(normalize(testing::two_branch_graph())),
                          build_tsort_forward(normalize(testing::chain_graph(5)))));
}

// Root 0 starts a thread 1->2->3 and a one-step thread 4; the sink joins
// them. Reached backwards from the sink, active step 3 with step 4 still on
// the front is a state of its own.
TEST(TSortGraph, BackwardFrontState) {
  std::vector<StepNode> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back({i, std::to_string(i), false});
  const FlowGraph g = normalize(
      FlowGraph(nodes, {{0, 1}, {1, 2}, {2, 3}, {0, 4}}));
  const TSortGraph s = build_tsort_backward(g);
  bool found = false;
  for (const auto& node : s.nodes()) {
    if (node.active == 3 && node.mark == bit(4)) found = true;
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(path_set(s), Paths(testing::permutation_sorts(g)));
}

TEST(TSortGraph, ForwardMarksArePrefixes) {
  const TSortGraph s = build_tsort_forward(normalize(testing::two_branch_graph()));
  for (int i = s.root() + 1; i < s.sink(); ++i) {
    const TSortNode& n = s.node(i);
    EXPECT_EQ(n.emitted, n.mark | bit(n.active));
    EXPECT_EQ(n.mark & bit(n.active), 0u);
  }
}

TEST(TSortGraph, ChainHelper) {
  const std::vector<NodeId> order{4, 2, 7};
  const TSortGraph s = TSortGraph::chain(order);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(enumerate_paths(s), (std::vector<std::vector<NodeId>>{order}));
  EXPECT_EQ(s.origin(), nullptr);
}

TEST(TSortGraph, PathCap) {
  const TSortGraph s = build_tsort_forward(model_problem(ThreadSpec({3, 3})));
  EXPECT_THROW(enumerate_paths(s, 19), CapExceededError);
  EXPECT_EQ(enumerate_paths(s, 20).size(), 20u);
}

TEST(TSortGraph, JsonHasActiveAndMark) {
  const std::string json =
      to_json(build_tsort_forward(model_problem(ThreadSpec({1, 1}))));
  EXPECT_NE(json.find("\"active\""), std::string::npos);
  EXPECT_NE(json.find("\"mark\""), std::string::npos);
  EXPECT_NE(json.find("\"edges\""), std::string::npos);
}

}  // namespace
}  // namespace flowground
