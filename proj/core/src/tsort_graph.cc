// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/tsort_graph.h"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace flowground {
namespace {

struct StateKey {
  NodeId active;
  NodeMask mask;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = k.mask * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.active) + 0x632BE59BD9B4E019ULL +
         (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Per-node relations of a flow graph as bitmasks.
struct GraphMasks {
  std::vector<NodeMask> pred, anc, desc;
  NodeMask all = 0;
};

GraphMasks masks_of(const FlowGraph& g) {
  if (!g.is_normalized()) {
    throw ValidationError("tSort construction needs a normalized flow graph");
  }
  if (g.size() > kMaxMaskedNodes) {
    throw CapExceededError("tSort construction supports at most " +
                           std::to_string(kMaxMaskedNodes) + " nodes, got " +
                           std::to_string(g.size()));
  }
  const int n = static_cast<int>(g.size());
  GraphMasks m;
  m.pred.assign(n, 0);
  m.anc.assign(n, 0);
  m.desc.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    m.all |= bit(v);
    for (NodeId u : g.predecessors(v)) m.pred[v] |= bit(u);
    for (NodeId u : g.ancestors(v)) m.anc[v] |= bit(u);
    for (NodeId w : g.descendants(v)) m.desc[v] |= bit(w);
  }
  return m;
}

template <typename F>
void for_each_bit(NodeMask mask, F&& f) {
  while (mask) {
    const int id = std::countr_zero(mask);
    f(static_cast<NodeId>(id));
    mask &= mask - 1;
  }
}

[[noreturn]] void node_cap_exceeded(std::size_t cap) {
  throw CapExceededError("tSort graph exceeds the node cap of " +
                         std::to_string(cap) + " states");
}

}  // namespace

std::vector<NodeId> mask_to_ids(NodeMask mask) {
  std::vector<NodeId> ids;
  for_each_bit(mask, [&](NodeId id) { ids.push_back(id); });
  return ids;
}

TSortGraph::TSortGraph(std::shared_ptr<const FlowGraph> origin,
                       TSortAlgorithm algorithm, std::vector<TSortNode> nodes,
                       std::vector<std::pair<int, int>> edges)
    : origin_(std::move(origin)),
      algorithm_(algorithm),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  const int n = static_cast<int>(nodes_.size());
  if (n < 2) throw ValidationError("tSort graph needs a root and a sink");
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
  for (const auto& [u, v] : edges_) {
    if (u < 0 || v >= n || u >= v) {
      throw ValidationError("tSort edges must follow the node order");
    }
    ++outdeg[u];
    ++indeg[v];
  }
  for (int i = 0; i < n; ++i) {
    if (i != 0 && indeg[i] == 0) {
      throw ValidationError("tSort node " + std::to_string(i) +
                            " is unreachable from the root");
    }
    if (i != n - 1 && outdeg[i] == 0) {
      throw ValidationError("tSort node " + std::to_string(i) +
                            " does not reach the sink");
    }
  }
  pred_offsets_.assign(n + 1, 0);
  succ_offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    pred_offsets_[i + 1] = pred_offsets_[i] + indeg[i];
    succ_offsets_[i + 1] = succ_offsets_[i] + outdeg[i];
  }
  pred_.resize(edges_.size());
  succ_.resize(edges_.size());
  std::vector<std::size_t> pfill(pred_offsets_.begin(), pred_offsets_.end() - 1);
  std::vector<std::size_t> sfill(succ_offsets_.begin(), succ_offsets_.end() - 1);
  // edges_ is sorted, so both adjacency lists come out ascending.
  for (const auto& [u, v] : edges_) {
    succ_[sfill[u]++] = v;
    pred_[pfill[v]++] = u;
  }
}

TSortGraph TSortGraph::chain(std::span<const NodeId> order) {
  std::vector<TSortNode> nodes;
  nodes.reserve(order.size() + 2);
  nodes.push_back({-1, 0, 0});
  for (NodeId id : order) nodes.push_back({id, 0, 0});
  nodes.push_back({-1, 0, 0});
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < static_cast<int>(nodes.size()); ++i) {
    edges.push_back({i, i + 1});
  }
  return TSortGraph(nullptr, TSortAlgorithm::kForward, std::move(nodes),
                    std::move(edges));
}

std::size_t TSortGraph::max_in_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, pred_offsets_[i + 1] - pred_offsets_[i]);
  }
  return best;
}

std::size_t TSortGraph::max_out_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, succ_offsets_[i + 1] - succ_offsets_[i]);
  }
  return best;
}

std::vector<NodeId> TSortGraph::step_ids() const {
  std::vector<NodeId> ids;
  for (int i = 1; i < sink(); ++i) ids.push_back(nodes_[i].active);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::pair<std::pair<NodeId, NodeMask>, std::pair<NodeId, NodeMask>>>
TSortGraph::canonical_edges() const {
  std::vector<std::pair<std::pair<NodeId, NodeMask>,
                        std::pair<NodeId, NodeMask>>>
      out;
  out.reserve(edges_.size());
  for (const auto& [u, v] : edges_) {
    out.push_back({{nodes_[u].active, nodes_[u].emitted},
                   {nodes_[v].active, nodes_[v].emitted}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

TSortGraph build_tsort_forward(const FlowGraph& g,
                               const TSortOptions& options) {
  const GraphMasks m = masks_of(g);
  const int n = static_cast<int>(g.size());
  // Augmented neighbourhood: successors plus every incomparable node.
  std::vector<NodeMask> neighbours(n);
  for (NodeId v = 0; v < n; ++v) {
    NodeMask succ = 0;
    for (NodeId w : g.successors(v)) succ |= bit(w);
    const NodeMask incomparable = m.all & ~(m.anc[v] | m.desc[v] | bit(v));
    neighbours[v] = succ | incomparable;
  }

  const NodeId root = *g.root();
  std::vector<TSortNode> nodes;
  std::vector<std::pair<int, int>> edges;
  std::unordered_map<StateKey, int, StateKeyHash> index;
  nodes.push_back({root, 0, bit(root)});
  index.emplace(StateKey{root, bit(root)}, 0);

  // Insertion order is BFS order; every edge grows the visited set by one
  // node, so BFS order is already topological.
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const NodeId active = nodes[head].active;
    const NodeMask visited = nodes[head].emitted;
    for_each_bit(neighbours[active] & ~visited, [&](NodeId next) {
      if (m.pred[next] & ~visited) return;  // does not conform to g
      const NodeMask grown = visited | bit(next);
      auto [it, inserted] = index.try_emplace(
          StateKey{next, grown}, static_cast<int>(nodes.size()));
      if (inserted) {
        if (nodes.size() >= options.node_cap) {
          node_cap_exceeded(options.node_cap);
        }
        nodes.push_back({next, visited, grown});
      }
      edges.push_back({static_cast<int>(head), it->second});
    });
  }
  return TSortGraph(std::make_shared<const FlowGraph>(g),
                    TSortAlgorithm::kForward, std::move(nodes),
                    std::move(edges));
}

TSortGraph build_tsort_backward(const FlowGraph& g,
                                const TSortOptions& options) {
  const GraphMasks m = masks_of(g);
  const NodeId sink = *g.sink();

  std::vector<TSortNode> found;  // discovery order, sink first
  std::vector<std::pair<int, int>> reversed;  // (later, earlier) in time
  std::unordered_map<StateKey, int, StateKeyHash> index;
  found.push_back({sink, 0, 0});
  index.emplace(StateKey{sink, 0}, 0);

  for (std::size_t head = 0; head < found.size(); ++head) {
    const NodeId active = found[head].active;
    const NodeMask candidates = m.pred[active] | found[head].mark;
    for_each_bit(candidates, [&](NodeId next) {
      const NodeMask front = candidates & ~bit(next);
      // Whatever stays in the front is emitted earlier in time, so `next`
      // must not be one of its ancestors.
      if (m.desc[next] & front) return;
      auto [it, inserted] = index.try_emplace(
          StateKey{next, front}, static_cast<int>(found.size()));
      if (inserted) {
        if (found.size() >= options.node_cap) {
          node_cap_exceeded(options.node_cap);
        }
        found.push_back({next, front, 0});
      }
      reversed.push_back({static_cast<int>(head), it->second});
    });
  }

  // The steps emitted up to a state are exactly the ancestors-or-self of
  // its active node and front.
  for (auto& node : found) {
    NodeMask emitted = m.anc[node.active] | bit(node.active);
    for_each_bit(node.mark,
                 [&](NodeId f) { emitted |= m.anc[f] | bit(f); });
    node.emitted = emitted;
  }

  std::vector<int> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::popcount(found[a].emitted) < std::popcount(found[b].emitted);
  });
  std::vector<int> relabel(found.size());
  std::vector<TSortNode> nodes;
  nodes.reserve(found.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    relabel[order[i]] = static_cast<int>(i);
    nodes.push_back(found[order[i]]);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(reversed.size());
  for (const auto& [later, earlier] : reversed) {
    edges.push_back({relabel[earlier], relabel[later]});
  }
  return TSortGraph(std::make_shared<const FlowGraph>(g),
                    TSortAlgorithm::kBackward, std::move(nodes),
                    std::move(edges));
}

TSortGraph build_tsort(const FlowGraph& g, TSortAlgorithm algorithm,
                       const TSortOptions& options) {
  return algorithm == TSortAlgorithm::kForward
             ? build_tsort_forward(g, options)
             : build_tsort_backward(g, options);
}

bool isomorphic(const TSortGraph& a, const TSortGraph& b) {
  if (a.size() != b.size() || a.num_edges() != b.num_edges()) return false;
  auto keys = [](const TSortGraph& s) {
    std::vector<std::pair<NodeId, NodeMask>> k;
    for (const auto& n : s.nodes()) k.push_back({n.active, n.emitted});
    std::sort(k.begin(), k.end());
    return k;
  };
  return keys(a) == keys(b) && a.canonical_edges() == b.canonical_edges();
}

std::vector<std::vector<NodeId>> enumerate_paths(const TSortGraph& s,
                                                 std::size_t cap) {
  std::vector<std::vector<NodeId>> paths;
  std::vector<NodeId> current;
  // (node, next successor offset)
  std::vector<std::pair<int, std::size_t>> stack{{s.root(), 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (node == s.sink()) {
      if (paths.size() == cap) {
        throw CapExceededError("more than " + std::to_string(cap) +
                               " root-to-sink paths");
      }
      paths.push_back(current);
      stack.pop_back();
      continue;
    }
    const auto succ = s.successors(node);
    if (next == succ.size()) {
      if (node != s.root()) current.pop_back();
      stack.pop_back();
      continue;
    }
    const int child = succ[next++];
    if (child != s.sink()) current.push_back(s.node(child).active);
    stack.push_back({child, 0});
  }
  return paths;
}

std::string to_json(const TSortGraph& s) {
  using nlohmann::json;
  json doc;
  doc["algorithm"] =
      s.algorithm() == TSortAlgorithm::kForward ? "forward" : "backward";
  doc["root"] = s.root();
  doc["sink"] = s.sink();
  doc["nodes"] = json::array();
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    const auto& node = s.node(i);
    std::string label;
    if (s.origin() && node.active >= 0) {
      label = s.origin()->node(node.active).label;
    }
    doc["nodes"].push_back({{"id", i},
                            {"label", label},
                            {"active", node.active},
                            {"mark", mask_to_ids(node.mark)},
                            {"emitted", mask_to_ids(node.emitted)}});
  }
  doc["edges"] = json::array();
  for (const auto& [u, v] : s.edges()) doc["edges"].push_back({u, v});
  return doc.dump(2) + "\n";
}

std::string to_dot(const TSortGraph& s) {
  std::ostringstream out;
  out << "digraph tsort {\n  rankdir=LR;\n";
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    const auto& node = s.node(i);
    out << "  s" << i << " [label=\"(" << node.active << ", {";
    const auto mark = mask_to_ids(node.mark);
    for (std::size_t k = 0; k < mark.size(); ++k) {
      out << (k ? "," : "") << mark[k];
    }
    out << "})\"];\n";
  }
  for (const auto& [u, v] : s.edges()) {
    out << "  s" << u << " -> s" << v << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace flowground
