// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// The tSort meta-graph: a DAG whose root-to-sink paths spell exactly the
// topological sorts of a flow graph. Prefixes that have emitted the same set
// of steps and end on the same step are merged into one state.

#ifndef FLOWGROUND_TSORT_GRAPH_H_
#define FLOWGROUND_TSORT_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowground/errors.h"
#include "flowground/flow_graph.h"

namespace flowground {

// Node sets over flow graphs with at most 64 nodes.
using NodeMask = std::uint64_t;

inline constexpr std::size_t kMaxMaskedNodes = 64;
inline constexpr std::size_t kDefaultTSortNodeCap = 1'000'000;

inline NodeMask bit(NodeId id) { return NodeMask{1} << id; }
std::vector<NodeId> mask_to_ids(NodeMask mask);

enum class TSortAlgorithm { kForward, kBackward };

struct TSortNode {
  NodeId active = 0;
  // Forward construction: nodes emitted before `active`.
  // Backward construction: the front of the traversal when `active` was
  // reached from the sink side.
  NodeMask mark = 0;
  // Every flow-graph node emitted up to and including `active` on any path
  // through this state. Identical for both constructions, so it serves as
  // the canonical merge key together with `active`.
  NodeMask emitted = 0;
};

struct TSortOptions {
  std::size_t node_cap = kDefaultTSortNodeCap;
};

class TSortGraph {
 public:
  // Nodes are stored in a topological order: index 0 is the root state and
  // the last index is the sink state.
  TSortGraph(std::shared_ptr<const FlowGraph> origin,
             TSortAlgorithm algorithm, std::vector<TSortNode> nodes,
             std::vector<std::pair<int, int>> edges);

  // Chain meta-graph for a fixed step order, without a backing flow graph.
  static TSortGraph chain(std::span<const NodeId> order);

  std::size_t size() const { return nodes_.size(); }
  // States excluding the terminal sink state: the root plus one state per
  // (active step, emitted set). This is the quantity counted by
  // count_tsort_nodes_closed_form.
  std::size_t num_states() const { return nodes_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }

  int root() const { return 0; }
  int sink() const { return static_cast<int>(nodes_.size()) - 1; }

  const TSortNode& node(int i) const { return nodes_[i]; }
  const std::vector<TSortNode>& nodes() const { return nodes_; }
  // Sorted (from, to) pairs of node indices, from < to.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  std::span<const int> predecessors(int i) const {
    return {pred_.data() + pred_offsets_[i],
            pred_.data() + pred_offsets_[i + 1]};
  }
  std::span<const int> successors(int i) const {
    return {succ_.data() + succ_offsets_[i],
            succ_.data() + succ_offsets_[i + 1]};
  }

  std::size_t max_in_degree() const;
  std::size_t max_out_degree() const;

  TSortAlgorithm algorithm() const { return algorithm_; }
  // Null for chain() graphs.
  const std::shared_ptr<const FlowGraph>& origin() const { return origin_; }
  // Step ids in the order they are reachable from root; every node except
  // root and sink has a step as its active node.
  std::vector<NodeId> step_ids() const;

  // Edge set keyed by (active, emitted) of both endpoints. Two constructions
  // over the same flow graph are isomorphic iff their canonical edges match.
  std::vector<std::pair<std::pair<NodeId, NodeMask>,
                        std::pair<NodeId, NodeMask>>>
  canonical_edges() const;

 private:
  std::shared_ptr<const FlowGraph> origin_;
  TSortAlgorithm algorithm_;
  std::vector<TSortNode> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::size_t> pred_offsets_, succ_offsets_;
  std::vector<int> pred_, succ_;
};

// Visited-set BFS from the root over the augmented graph, where every pair
// of incomparable nodes is connected. Requires a normalized graph with at
// most 64 nodes.
TSortGraph build_tsort_forward(const FlowGraph& g,
                               const TSortOptions& options = {});

// Front-based BFS from the sink along reversed edges, rejecting moves where
// the new active node is an ancestor of a front node. Edges are reversed on
// output so the orientation matches build_tsort_forward.
TSortGraph build_tsort_backward(const FlowGraph& g,
                                const TSortOptions& options = {});

TSortGraph build_tsort(const FlowGraph& g, TSortAlgorithm algorithm,
                       const TSortOptions& options = {});

bool isomorphic(const TSortGraph& a, const TSortGraph& b);

// Active step sequences of all root-to-sink paths, in DFS order of
// successor indices. Throws CapExceededError past `cap` paths.
std::vector<std::vector<NodeId>> enumerate_paths(
    const TSortGraph& s, std::size_t cap = kDefaultSortCap);

// JSON mirroring the flow-graph schema, with "active", "mark" and "emitted"
// per node.
std::string to_json(const TSortGraph& s);
std::string to_dot(const TSortGraph& s);

}  // namespace flowground

#endif  // FLOWGROUND_TSORT_GRAPH_H_
