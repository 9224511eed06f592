// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hard alignment of procedure steps to an observation sequence: Drop-DTW
// over a fixed step order and Graph-Drop-DTW over a tSort meta-graph.

#ifndef FLOWGROUND_ALIGN_H_
#define FLOWGROUND_ALIGN_H_

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "flowground/errors.h"
#include "flowground/flow_graph.h"
#include "flowground/matrix.h"
#include "flowground/tsort_graph.h"

namespace flowground {

// Label used for dropped clips and background frames.
inline constexpr NodeId kDropLabel = -1;

// Row-major sequence of equally sized vectors.
struct EmbeddingSequence {
  enum class Kind { kStep, kClip };

  Matrix vectors;  // one vector per row
  Kind kind = Kind::kClip;

  std::size_t count() const { return vectors.rows(); }
  std::size_t dim() const { return vectors.cols(); }
};

// Match costs between steps (rows) and clips (columns), in nats.
class CostMatrix {
 public:
  CostMatrix() = default;
  // `row_ids[r]` is the flow-graph step id of row r.
  CostMatrix(Matrix values, std::vector<NodeId> row_ids);

  const Matrix& values() const { return values_; }
  const std::vector<NodeId>& row_ids() const { return row_ids_; }
  std::size_t steps() const { return values_.rows(); }
  std::size_t clips() const { return values_.cols(); }
  // Throws ValidationError for ids without a row.
  std::size_t row_of(NodeId id) const;
  double operator()(std::size_t row, std::size_t clip) const {
    return values_(row, clip);
  }

 private:
  Matrix values_;
  std::vector<NodeId> row_ids_;
  std::vector<int> row_lookup_;  // dense id -> row, -1 when absent
};

using DropCosts = std::vector<double>;

enum class DropMode {
  kMatrix,  // one percentile over every entry, broadcast to all clips
  kColumn,  // a percentile per clip column
};

struct Alignment {
  double cost = 0.0;
  // Inclusive [first, last] clip interval per matched step.
  std::map<NodeId, std::pair<int, int>> segments;
  std::vector<int> dropped;
  std::vector<NodeId> tau_star;
  // Per clip: the matched step id, or kDropLabel.
  std::vector<NodeId> labels;
};

// C[i][j] = -log softmax_i(<clip_j, step_i> / temperature). Rows follow
// `row_ids` (defaults to 0..K-1 when empty).
CostMatrix compute_cost_matrix(const EmbeddingSequence& steps,
                               const EmbeddingSequence& clips,
                               double temperature,
                               std::vector<NodeId> row_ids = {});

inline constexpr double kDefaultDropPercentile = 30.0;

// Linear-interpolation percentile of `values` (numpy's default convention):
// value = (1 - w) * values[lower] + w * values[upper], where lower/upper
// index the input span.
struct PercentileTerms {
  double value = 0.0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  double upper_weight = 0.0;
};

// `pct` must lie in (0, 100]. Throws ValidationError on empty input.
PercentileTerms percentile_terms(std::span<const double> values, double pct);
double percentile(std::span<const double> values, double pct);

DropCosts compute_drop_costs(const CostMatrix& c,
                             double pct = kDefaultDropPercentile,
                             DropMode mode = DropMode::kMatrix);

// Graph-Drop-DTW. Every step of s must have a row in c, and there must be
// at least as many clips as steps.
Alignment graph_drop_dtw(const TSortGraph& s, const CostMatrix& c,
                         const DropCosts& d);

// Drop-DTW over a fixed step order; the chain case of graph_drop_dtw.
Alignment drop_dtw(std::span<const NodeId> step_order, const CostMatrix& c,
                   const DropCosts& d);

// Per-clip labels from segments, with dropped clips set to kDropLabel.
std::vector<NodeId> segmentation_labels(const Alignment& a,
                                        std::size_t n_clips);

// Shared precondition checks; throws ValidationError / InfeasibleError.
void check_alignment_inputs(const TSortGraph& s, const CostMatrix& c,
                            const DropCosts& d);

}  // namespace flowground

#endif  // FLOWGROUND_ALIGN_H_
