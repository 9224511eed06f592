// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/align.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flowground {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Traceback codes; non-negative values name the tSort predecessor.
constexpr int kChoiceDrop = -2;
constexpr int kChoiceStay = -1;

void check_finite(const Matrix& m, const char* what) {
  for (double v : m.flat()) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + " contains non-finite values");
    }
  }
}

}  // namespace

CostMatrix::CostMatrix(Matrix values, std::vector<NodeId> row_ids)
    : values_(std::move(values)), row_ids_(std::move(row_ids)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw ValidationError("cost matrix must have at least one row and column");
  }
  if (row_ids_.empty()) {
    row_ids_.resize(values_.rows());
    std::iota(row_ids_.begin(), row_ids_.end(), 0);
  }
  if (row_ids_.size() != values_.rows()) {
    throw ValidationError("cost matrix has " + std::to_string(values_.rows()) +
                          " rows but " + std::to_string(row_ids_.size()) +
                          " row ids");
  }
  check_finite(values_, "cost matrix");
  const NodeId max_id = *std::max_element(row_ids_.begin(), row_ids_.end());
  if (*std::min_element(row_ids_.begin(), row_ids_.end()) < 0) {
    throw ValidationError("cost matrix row ids must be non-negative");
  }
  row_lookup_.assign(max_id + 1, -1);
  for (std::size_t r = 0; r < row_ids_.size(); ++r) {
    if (row_lookup_[row_ids_[r]] != -1) {
      throw ValidationError("duplicate cost matrix row id " +
                            std::to_string(row_ids_[r]));
    }
    row_lookup_[row_ids_[r]] = static_cast<int>(r);
  }
}

std::size_t CostMatrix::row_of(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(row_lookup_.size()) ||
      row_lookup_[id] < 0) {
    throw ValidationError("no cost matrix row for step " + std::to_string(id));
  }
  return static_cast<std::size_t>(row_lookup_[id]);
}

CostMatrix compute_cost_matrix(const EmbeddingSequence& steps,
                               const EmbeddingSequence& clips,
                               double temperature,
                               std::vector<NodeId> row_ids) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be positive and finite");
  }
  if (steps.count() == 0 || clips.count() == 0) {
    throw ValidationError("need at least one step and one clip embedding");
  }
  if (steps.dim() != clips.dim()) {
    throw ValidationError("step dimension " + std::to_string(steps.dim()) +
                          " differs from clip dimension " +
                          std::to_string(clips.dim()));
  }
  check_finite(steps.vectors, "step embeddings");
  check_finite(clips.vectors, "clip embeddings");

  const std::size_t k = steps.count();
  const std::size_t n = clips.count();
  Matrix costs(k, n);
  std::vector<double> scores(k);
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = clips.vectors.row(j);
    for (std::size_t i = 0; i < k; ++i) {
      const auto v = steps.vectors.row(i);
      scores[i] =
          std::inner_product(x.begin(), x.end(), v.begin(), 0.0) / temperature;
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - top);
    const double log_norm = top + std::log(sum);
    for (std::size_t i = 0; i < k; ++i) costs(i, j) = log_norm - scores[i];
  }
  return CostMatrix(std::move(costs), std::move(row_ids));
}

PercentileTerms percentile_terms(std::span<const double> values, double pct) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  if (!(pct > 0.0 && pct <= 100.0)) {
    throw ValidationError("percentile must lie in (0, 100]");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return values[a] < values[b];
  });
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  PercentileTerms t;
  t.lower = order[lo];
  t.upper = order[hi];
  t.upper_weight = pos - static_cast<double>(lo);
  t.value = values[t.lower] +
            t.upper_weight * (values[t.upper] - values[t.lower]);
  return t;
}

double percentile(std::span<const double> values, double pct) {
  return percentile_terms(values, pct).value;
}

DropCosts compute_drop_costs(const CostMatrix& c, double pct, DropMode mode) {
  const Matrix& m = c.values();
  if (m.empty()) throw ValidationError("drop costs of an empty cost matrix");
  if (mode == DropMode::kMatrix) {
    return DropCosts(m.cols(), percentile(m.flat(), pct));
  }
  DropCosts d(m.cols());
  std::vector<double> column(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) column[i] = m(i, j);
    d[j] = percentile(column, pct);
  }
  return d;
}

void check_alignment_inputs(const TSortGraph& s, const CostMatrix& c,
                            const DropCosts& d) {
  if (d.size() != c.clips()) {
    throw ValidationError("got " + std::to_string(d.size()) +
                          " drop costs for " + std::to_string(c.clips()) +
                          " clips");
  }
  for (double v : d) {
    if (std::isnan(v) || v == -kInf) {
      throw ValidationError("drop costs must be finite or +inf");
    }
  }
  const auto steps = s.step_ids();
  if (steps.size() != c.steps()) {
    throw ValidationError("graph has " + std::to_string(steps.size()) +
                          " steps but the cost matrix has " +
                          std::to_string(c.steps()) + " rows");
  }
  for (NodeId id : steps) c.row_of(id);
  if (steps.size() > c.clips()) {
    throw InfeasibleError("cannot ground " + std::to_string(steps.size()) +
                          " steps into " + std::to_string(c.clips()) +
                          " clips: every step needs at least one clip");
  }
}

Alignment graph_drop_dtw(const TSortGraph& s, const CostMatrix& c,
                         const DropCosts& d) {
  check_alignment_inputs(s, c, d);
  const int states = static_cast<int>(s.size());
  const int root = s.root();
  const int sink = s.sink();
  const std::size_t n = c.clips();
  const std::size_t width = n + 1;

  std::vector<std::size_t> row(states, 0);
  for (int i = root + 1; i < sink; ++i) row[i] = c.row_of(s.node(i).active);

  std::vector<double> table(states * width, kInf);
  std::vector<int> choice(states * width, kChoiceDrop);
  auto at = [width](int i, std::size_t j) { return i * width + j; };

  table[at(root, 0)] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    table[at(root, j)] = table[at(root, j - 1)] + d[j - 1];
  }

  const Matrix& cost = c.values();
  for (int i = root + 1; i < sink; ++i) {
    const auto preds = s.predecessors(i);
    const auto cost_row = cost.row(row[i]);
    for (std::size_t j = 1; j <= n; ++j) {
      const double here = table[at(i, j - 1)];
      double best = here;
      int from = kChoiceStay;
      for (int k : preds) {
        const double v = table[at(k, j - 1)];
        if (v < best) {
          best = v;
          from = k;
        }
      }
      const double match = cost_row[j - 1] + best;
      const double drop = d[j - 1] + here;
      if (match <= drop) {
        table[at(i, j)] = match;
        choice[at(i, j)] = from;
      } else {
        table[at(i, j)] = drop;
        choice[at(i, j)] = kChoiceDrop;
      }
    }
  }

  int last = -1;
  double total = kInf;
  for (int k : s.predecessors(sink)) {
    if (table[at(k, n)] < total) {
      total = table[at(k, n)];
      last = k;
    }
  }
  if (last < 0 || last == root || !std::isfinite(total)) {
    throw InfeasibleError("no feasible alignment");
  }

  Alignment a;
  a.cost = total;
  a.labels.assign(n, kDropLabel);
  std::vector<int> path{last};
  int i = last;
  for (std::size_t j = n; j > 0; --j) {
    if (i == root) continue;  // prefix of dropped clips
    const int ch = choice[at(i, j)];
    if (ch == kChoiceDrop) continue;
    a.labels[j - 1] = s.node(i).active;
    if (ch != kChoiceStay) {
      i = ch;
      if (i != root) path.push_back(i);
    }
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    a.tau_star.push_back(s.node(*it).active);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const NodeId label = a.labels[j];
    if (label == kDropLabel) {
      a.dropped.push_back(static_cast<int>(j));
      continue;
    }
    auto [it, inserted] = a.segments.try_emplace(
        label, static_cast<int>(j), static_cast<int>(j));
    if (!inserted) it->second.second = static_cast<int>(j);
  }
  return a;
}

Alignment drop_dtw(std::span<const NodeId> step_order, const CostMatrix& c,
                   const DropCosts& d) {
  std::vector<NodeId> sorted(step_order.begin(), step_order.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("step order repeats a step");
  }
  return graph_drop_dtw(TSortGraph::chain(step_order), c, d);
}

std::vector<NodeId> segmentation_labels(const Alignment& a,
                                        std::size_t n_clips) {
  std::vector<NodeId> labels(n_clips, kDropLabel);
  for (const auto& [id, span] : a.segments) {
    for (int j = span.first; j <= span.second; ++j) {
      if (j >= 0 && static_cast<std::size_t>(j) < n_clips) labels[j] = id;
    }
  }
  for (int j : a.dropped) {
    if (j >= 0 && static_cast<std::size_t>(j) < n_clips) labels[j] = kDropLabel;
  }
  return labels;
}

}  // namespace flowground
