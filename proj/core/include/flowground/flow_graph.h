// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Procedure flow graphs: DAGs over procedure steps, normalized to a single
// virtual root and a single virtual sink.

#ifndef FLOWGROUND_FLOW_GRAPH_H_
#define FLOWGROUND_FLOW_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "flowground/errors.h"

namespace flowground {

using BigInt = boost::multiprecision::cpp_int;

struct StepNode {
  NodeId id = 0;
  std::string label;
  bool is_virtual = false;

  bool operator==(const StepNode&) const = default;
};

using Edge = std::pair<NodeId, NodeId>;

// An immutable validated DAG. Construction checks id density, edge
// endpoints, duplicate edges, self-loops and cycles, and precomputes the
// transitive closure so that ancestry queries are O(1).
class FlowGraph {
 public:
  FlowGraph() = default;

  // Nodes may be given in any order but their ids must be exactly
  // 0..nodes.size()-1. Throws ValidationError / CycleError.
  FlowGraph(std::vector<StepNode> nodes, std::vector<Edge> edges);

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<StepNode>& nodes() const { return nodes_; }
  const StepNode& node(NodeId id) const;
  // Edges sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const NodeId> successors(NodeId id) const;
  std::span<const NodeId> predecessors(NodeId id) const;
  // All strict descendants / ancestors in ascending id order.
  std::vector<NodeId> descendants(NodeId id) const;
  std::vector<NodeId> ancestors(NodeId id) const;
  // True when a non-empty directed path leads from `u` to `v`.
  bool is_ancestor(NodeId u, NodeId v) const;
  // Neither node reaches the other.
  bool comparable(NodeId u, NodeId v) const {
    return u == v || is_ancestor(u, v) || is_ancestor(v, u);
  }

  std::vector<NodeId> sources() const;
  std::vector<NodeId> sinks() const;

  // Set once the graph has a unique virtual source / sink.
  std::optional<NodeId> root() const { return root_; }
  std::optional<NodeId> sink() const { return sink_; }
  bool is_normalized() const { return root_ && sink_; }

  // Non-virtual node ids, ascending. This is also the default row order of
  // cost matrices built against the graph.
  std::vector<NodeId> step_ids() const;
  std::size_t num_steps() const;

  bool operator==(const FlowGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  void check(NodeId id) const;

  std::vector<StepNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> succ_;
  std::vector<std::vector<NodeId>> pred_;
  // reach_[u][v] == true iff u is a strict ancestor of v.
  std::vector<std::vector<bool>> reach_;
  std::optional<NodeId> root_;
  std::optional<NodeId> sink_;
};

// Adds a virtual root feeding every source and a virtual sink fed by every
// sink. Virtual nodes get the next free ids (root first) and empty labels.
// A graph that already has a unique virtual source and sink is returned
// unchanged, so the operation is idempotent.
FlowGraph normalize(const FlowGraph& g);

// The same step nodes with every edge removed, normalized ("bag of steps").
FlowGraph bag_of_steps(const FlowGraph& g);

// Chain over `order` (step labels taken from `g`), normalized.
FlowGraph linear_graph(const FlowGraph& g, std::span<const NodeId> order);

inline constexpr std::size_t kDefaultSortCap = 1'000'000;

// Calls `visit` with every topological sort of g's non-virtual nodes, in
// lexicographic order. `visit` may return false to stop early. Throws
// CapExceededError once more than `cap` sorts would be produced.
void for_each_topological_sort(
    const FlowGraph& g,
    const std::function<bool(std::span<const NodeId>)>& visit,
    std::size_t cap = kDefaultSortCap);

std::vector<std::vector<NodeId>> enumerate_topological_sorts(
    const FlowGraph& g, std::size_t cap = kDefaultSortCap);

bool is_topological_sort(const FlowGraph& g, std::span<const NodeId> order);

// Thread sizes n_1..n_T of a model problem: T disjoint chains.
class ThreadSpec {
 public:
  explicit ThreadSpec(std::vector<int> thread_sizes);
  // Parses "n1,n2,...".
  static ThreadSpec parse(std::string_view text);

  const std::vector<int>& sizes() const { return sizes_; }
  int threads() const { return static_cast<int>(sizes_.size()); }
  int total() const;

  // Sizes n_t in {floor(n/T), ceil(n/T)} summing to n.
  static ThreadSpec balanced(int n, int threads);

 private:
  std::vector<int> sizes_;
};

// Virtual root -> T disjoint chains -> virtual sink. Steps are numbered
// thread by thread, so ascending ids are a valid execution order.
FlowGraph model_problem(const ThreadSpec& spec);

// Recovers the thread spec when g (normalized) is a set of disjoint chains
// between its virtual root and sink.
std::optional<ThreadSpec> as_model_problem(const FlowGraph& g);

// n! / (n_1! ... n_T!)
BigInt count_tsorts_closed_form(const ThreadSpec& spec);
// 1 + sum_t n_t * prod_{j != t} (n_j + 1)
BigInt count_tsort_nodes_closed_form(const ThreadSpec& spec);
// N_sorts * n / (T * |V_S|), with n counting step nodes only.
double complexity_ratio(const ThreadSpec& spec);

// Flow-graph JSON: {"nodes":[{"id":0,"label":"..."}],"edges":[[0,1]]}.
// Nodes may carry "virtual": true. Throws ValidationError / CycleError.
FlowGraph parse_flow_graph(std::string_view document);
std::string to_json(const FlowGraph& g);
std::string to_dot(const FlowGraph& g);

}  // namespace flowground

#endif  // FLOWGROUND_FLOW_GRAPH_H_
