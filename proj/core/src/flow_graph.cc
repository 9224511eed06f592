// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/flow_graph.h"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace flowground {
namespace {

using json = nlohmann::json;

// Returns one directed cycle, or an empty vector when the graph is acyclic.
std::vector<NodeId> find_cycle(const std::vector<std::vector<NodeId>>& succ) {
  const int n = static_cast<int>(succ.size());
  enum Color : char { kWhite, kGray, kBlack };
  std::vector<Color> color(n, kWhite);
  std::vector<NodeId> parent(n, -1);
  // Iterative DFS: (node, next successor index).
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId start = 0; start < n; ++start) {
    if (color[start] != kWhite) continue;
    stack.push_back({start, 0});
    color[start] = kGray;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next == succ[u].size()) {
        color[u] = kBlack;
        stack.pop_back();
        continue;
      }
      const NodeId v = succ[u][next++];
      if (color[v] == kGray) {
        std::vector<NodeId> cycle;
        for (NodeId w = u; w != v; w = parent[w]) cycle.push_back(w);
        cycle.push_back(v);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (color[v] == kWhite) {
        parent[v] = u;
        color[v] = kGray;
        stack.push_back({v, 0});
      }
    }
  }
  return {};
}

std::string join_ids(std::span<const NodeId> ids, const char* sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << sep;
    out << ids[i];
  }
  return out.str();
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

FlowGraph::FlowGraph(std::vector<StepNode> nodes, std::vector<Edge> edges) {
  const int n = static_cast<int>(nodes.size());
  std::sort(nodes.begin(), nodes.end(),
            [](const StepNode& a, const StepNode& b) { return a.id < b.id; });
  for (int i = 0; i < n; ++i) {
    if (nodes[i].id != i) {
      if (i > 0 && nodes[i].id == nodes[i - 1].id) {
        throw ValidationError("duplicate node id " +
                              std::to_string(nodes[i].id));
      }
      throw ValidationError("node ids must be contiguous from 0; missing id " +
                            std::to_string(i));
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw ValidationError("edge [" + std::to_string(u) + "," +
                            std::to_string(v) + "] references an unknown node");
    }
    if (u == v) {
      throw CycleError("self-loop on node " + std::to_string(u), {u});
    }
    if (e > 0 && edges[e - 1] == edges[e]) {
      throw ValidationError("duplicate edge [" + std::to_string(u) + "," +
                            std::to_string(v) + "]");
    }
  }

  nodes_ = std::move(nodes);
  edges_ = std::move(edges);
  succ_.assign(n, {});
  pred_.assign(n, {});
  for (const auto& [u, v] : edges_) {
    succ_[u].push_back(v);
    pred_[v].push_back(u);
  }
  for (auto& p : pred_) std::sort(p.begin(), p.end());

  if (auto cycle = find_cycle(succ_); !cycle.empty()) {
    const std::string what = "cycle detected: " + join_ids(cycle, " -> ") +
                             " -> " + std::to_string(cycle.front());
    throw CycleError(what, std::move(cycle));
  }

  // Transitive closure in reverse topological order.
  std::vector<int> indeg(n, 0);
  for (const auto& [u, v] : edges_) ++indeg[v];
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    if (indeg[v] == 0) order.push_back(v);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (NodeId v : succ_[order[i]]) {
      if (--indeg[v] == 0) order.push_back(v);
    }
  }
  reach_.assign(n, std::vector<bool>(n, false));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId u = *it;
    for (NodeId v : succ_[u]) {
      reach_[u][v] = true;
      for (NodeId w = 0; w < n; ++w) {
        if (reach_[v][w]) reach_[u][w] = true;
      }
    }
  }

  const auto src = sources();
  const auto snk = sinks();
  if (src.size() == 1 && snk.size() == 1 && src[0] != snk[0] &&
      nodes_[src[0]].is_virtual && nodes_[snk[0]].is_virtual) {
    root_ = src[0];
    sink_ = snk[0];
  }
}

void FlowGraph::check(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) {
    throw ValidationError("unknown node id " + std::to_string(id));
  }
}

const StepNode& FlowGraph::node(NodeId id) const {
  check(id);
  return nodes_[id];
}

std::span<const NodeId> FlowGraph::successors(NodeId id) const {
  check(id);
  return succ_[id];
}

std::span<const NodeId> FlowGraph::predecessors(NodeId id) const {
  check(id);
  return pred_[id];
}

std::vector<NodeId> FlowGraph::descendants(NodeId id) const {
  check(id);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < static_cast<NodeId>(size()); ++v) {
    if (reach_[id][v]) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> FlowGraph::ancestors(NodeId id) const {
  check(id);
  std::vector<NodeId> out;
  for (NodeId u = 0; u < static_cast<NodeId>(size()); ++u) {
    if (reach_[u][id]) out.push_back(u);
  }
  return out;
}

bool FlowGraph::is_ancestor(NodeId u, NodeId v) const {
  check(u);
  check(v);
  return reach_[u][v];
}

std::vector<NodeId> FlowGraph::sources() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < static_cast<NodeId>(size()); ++v) {
    if (pred_[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> FlowGraph::sinks() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < static_cast<NodeId>(size()); ++v) {
    if (succ_[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> FlowGraph::step_ids() const {
  std::vector<NodeId> out;
  for (const auto& node : nodes_) {
    if (!node.is_virtual) out.push_back(node.id);
  }
  return out;
}

std::size_t FlowGraph::num_steps() const {
  return std::count_if(nodes_.begin(), nodes_.end(),
                       [](const StepNode& n) { return !n.is_virtual; });
}

FlowGraph normalize(const FlowGraph& g) {
  if (g.is_normalized()) return g;
  std::vector<StepNode> nodes = g.nodes();
  std::vector<Edge> edges = g.edges();
  NodeId next = static_cast<NodeId>(nodes.size());
  if (!g.root()) {
    const NodeId root = next++;
    nodes.push_back({root, "", true});
    for (NodeId s : g.sources()) edges.push_back({root, s});
  }
  if (!g.sink()) {
    const NodeId sink = next++;
    nodes.push_back({sink, "", true});
    auto ends = g.sinks();
    if (ends.empty()) {
      // Only possible for the empty graph, where the new root is the end.
      ends.push_back(sink - 1);
    }
    for (NodeId s : ends) edges.push_back({s, sink});
  }
  return FlowGraph(std::move(nodes), std::move(edges));
}

namespace {

// Step nodes of g without the virtual ones. Steps keep their ids, which
// requires virtual nodes to trail the steps (as normalize() arranges).
std::vector<StepNode> step_nodes(const FlowGraph& g) {
  std::vector<StepNode> nodes;
  for (const auto& node : g.nodes()) {
    if (node.is_virtual) continue;
    if (node.id != static_cast<NodeId>(nodes.size())) {
      throw ValidationError("virtual nodes must come after all step nodes");
    }
    nodes.push_back({node.id, node.label, false});
  }
  return nodes;
}

}  // namespace

FlowGraph bag_of_steps(const FlowGraph& g) {
  return normalize(FlowGraph(step_nodes(g), {}));
}

FlowGraph linear_graph(const FlowGraph& g, std::span<const NodeId> order) {
  std::vector<StepNode> nodes = step_nodes(g);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < order.size(); ++i) {
    edges.push_back({order[i - 1], order[i]});
  }
  return normalize(FlowGraph(std::move(nodes), std::move(edges)));
}

void for_each_topological_sort(
    const FlowGraph& g,
    const std::function<bool(std::span<const NodeId>)>& visit,
    std::size_t cap) {
  const int n = static_cast<int>(g.size());
  std::vector<int> indeg(n, 0);
  for (const auto& [u, v] : g.edges()) ++indeg[v];
  std::vector<char> used(n, 0);
  std::vector<NodeId> order;      // all nodes, virtual included
  std::vector<NodeId> steps_only;
  order.reserve(n);
  std::size_t found = 0;
  bool stop = false;

  std::function<void()> recurse = [&]() {
    if (static_cast<int>(order.size()) == n) {
      if (++found > cap) {
        throw CapExceededError("more than " + std::to_string(cap) +
                               " topological sorts; use the tSort graph");
      }
      steps_only.clear();
      for (NodeId v : order) {
        if (!g.nodes()[v].is_virtual) steps_only.push_back(v);
      }
      if (!visit(steps_only)) stop = true;
      return;
    }
    for (NodeId v = 0; v < n && !stop; ++v) {
      if (used[v] || indeg[v] != 0) continue;
      used[v] = 1;
      order.push_back(v);
      for (NodeId w : g.successors(v)) --indeg[w];
      recurse();
      for (NodeId w : g.successors(v)) ++indeg[w];
      order.pop_back();
      used[v] = 0;
    }
  };
  recurse();
}

std::vector<std::vector<NodeId>> enumerate_topological_sorts(
    const FlowGraph& g, std::size_t cap) {
  std::vector<std::vector<NodeId>> out;
  for_each_topological_sort(
      g,
      [&](std::span<const NodeId> sort) {
        out.emplace_back(sort.begin(), sort.end());
        return true;
      },
      cap);
  return out;
}

bool is_topological_sort(const FlowGraph& g, std::span<const NodeId> order) {
  const int n = static_cast<int>(g.size());
  std::vector<int> pos(n, -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeId v = order[i];
    if (v < 0 || v >= n || pos[v] != -1 || g.nodes()[v].is_virtual) {
      return false;
    }
    pos[v] = static_cast<int>(i);
  }
  if (order.size() != g.num_steps()) return false;
  for (const auto& [u, v] : g.edges()) {
    if (g.nodes()[u].is_virtual || g.nodes()[v].is_virtual) continue;
    if (pos[u] > pos[v]) return false;
  }
  return true;
}

ThreadSpec::ThreadSpec(std::vector<int> thread_sizes)
    : sizes_(std::move(thread_sizes)) {
  if (sizes_.empty()) throw ValidationError("thread spec needs T >= 1");
  for (int s : sizes_) {
    if (s < 1) throw ValidationError("thread sizes must be >= 1");
  }
}

ThreadSpec ThreadSpec::parse(std::string_view text) {
  std::vector<int> sizes;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ValidationError("bad thread spec token '" + std::string(token) +
                            "'");
    }
    sizes.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return ThreadSpec(std::move(sizes));
}

int ThreadSpec::total() const {
  return std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

ThreadSpec ThreadSpec::balanced(int n, int threads) {
  if (threads < 1 || n < threads) {
    throw ValidationError("balanced spec needs 1 <= T <= n");
  }
  std::vector<int> sizes(threads, n / threads);
  for (int t = 0; t < n % threads; ++t) ++sizes[t];
  return ThreadSpec(std::move(sizes));
}

FlowGraph model_problem(const ThreadSpec& spec) {
  std::vector<StepNode> nodes;
  std::vector<Edge> edges;
  const NodeId n = spec.total();
  const NodeId root = n;
  const NodeId sink = n + 1;
  NodeId next = 0;
  for (int t = 0; t < spec.threads(); ++t) {
    for (int k = 0; k < spec.sizes()[t]; ++k) {
      const NodeId id = next++;
      nodes.push_back({id, "t" + std::to_string(t + 1) + "." +
                               std::to_string(k + 1), false});
      edges.push_back(k == 0 ? Edge{root, id} : Edge{id - 1, id});
      if (k + 1 == spec.sizes()[t]) edges.push_back({id, sink});
    }
  }
  nodes.push_back({root, "", true});
  nodes.push_back({sink, "", true});
  return FlowGraph(std::move(nodes), std::move(edges));
}

std::optional<ThreadSpec> as_model_problem(const FlowGraph& g) {
  if (!g.is_normalized() || g.num_steps() == 0) return std::nullopt;
  const NodeId root = *g.root();
  const NodeId sink = *g.sink();
  for (NodeId v : g.step_ids()) {
    if (g.predecessors(v).size() != 1 || g.successors(v).size() != 1) {
      return std::nullopt;
    }
  }
  std::vector<int> sizes;
  for (NodeId head : g.successors(root)) {
    if (head == sink) return std::nullopt;
    int len = 0;
    NodeId v = head;
    while (v != sink) {
      if (g.node(v).is_virtual) return std::nullopt;
      ++len;
      v = g.successors(v)[0];
    }
    sizes.push_back(len);
  }
  // Every step has one predecessor and one successor, so the chains reached
  // from the root cover all steps exactly when their lengths add up.
  if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) !=
      g.num_steps()) {
    return std::nullopt;
  }
  return ThreadSpec(std::move(sizes));
}

BigInt count_tsorts_closed_form(const ThreadSpec& spec) {
  BigInt denom = 1;
  for (int s : spec.sizes()) denom *= factorial(s);
  return factorial(spec.total()) / denom;
}

BigInt count_tsort_nodes_closed_form(const ThreadSpec& spec) {
  BigInt total = 1;
  const auto& n = spec.sizes();
  for (std::size_t t = 0; t < n.size(); ++t) {
    BigInt term = n[t];
    for (std::size_t j = 0; j < n.size(); ++j) {
      if (j != t) term *= n[j] + 1;
    }
    total += term;
  }
  return total;
}

double complexity_ratio(const ThreadSpec& spec) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational num =
      cpp_rational(count_tsorts_closed_form(spec) * spec.total());
  const cpp_rational den =
      cpp_rational(count_tsort_nodes_closed_form(spec) * spec.threads());
  return static_cast<double>(num / den);
}

FlowGraph parse_flow_graph(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed flow-graph JSON: ") +
                          e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ValidationError("flow graph must be an object with a 'nodes' array");
  }
  std::vector<StepNode> nodes;
  for (const auto& item : doc["nodes"]) {
    if (!item.is_object() || !item.contains("id") ||
        !item["id"].is_number_integer()) {
      throw ValidationError("every node needs an integer 'id'");
    }
    StepNode node;
    node.id = item["id"].get<NodeId>();
    if (item.contains("label")) {
      if (!item["label"].is_string()) {
        throw ValidationError("node 'label' must be a string");
      }
      node.label = item["label"].get<std::string>();
    }
    if (item.contains("virtual")) {
      if (!item["virtual"].is_boolean()) {
        throw ValidationError("node 'virtual' must be a boolean");
      }
      node.is_virtual = item["virtual"].get<bool>();
    }
    nodes.push_back(std::move(node));
  }
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) {
      throw ValidationError("'edges' must be an array");
    }
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer()) {
        throw ValidationError("every edge must be a pair of integer ids");
      }
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
  }
  return FlowGraph(std::move(nodes), std::move(edges));
}

std::string to_json(const FlowGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& node : g.nodes()) {
    json item = {{"id", node.id}, {"label", node.label}};
    if (node.is_virtual) item["virtual"] = true;
    doc["nodes"].push_back(std::move(item));
  }
  doc["edges"] = json::array();
  for (const auto& [u, v] : g.edges()) doc["edges"].push_back({u, v});
  return doc.dump(2) + "\n";
}

std::string to_dot(const FlowGraph& g) {
  std::ostringstream out;
  out << "digraph flow {\n  rankdir=LR;\n";
  for (const auto& node : g.nodes()) {
    out << "  n" << node.id << " [label=\"";
    if (node.is_virtual) {
      out << (g.root() == node.id ? "root" : "sink")
          << "\", shape=point];\n";
    } else {
      out << node.id << ": " << dot_escape(node.label) << "\"];\n";
    }
  }
  for (const auto& [u, v] : g.edges()) {
    out << "  n" << u << " -> n" << v << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace flowground
