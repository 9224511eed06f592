// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable grounding: smooth-min relaxation of Graph-Drop-DTW with
// reverse-mode gradients, the attention-pooled clustering regularizer, and a
// small gradient-descent trainer for a projection of clip embeddings.

#ifndef FLOWGROUND_SOFT_H_
#define FLOWGROUND_SOFT_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "flowground/align.h"
#include "flowground/flow_graph.h"
#include "flowground/matrix.h"
#include "flowground/tsort_graph.h"

namespace flowground {

struct SmoothingConfig {
  double gamma = 0.1;
};

// Gradient-carrying result of the relaxed DP.
struct LossValue {
  double value = 0.0;
  Matrix grad_costs;               // dL/dC, K x N
  std::vector<double> grad_drops;  // dL/dd, N
};

// Loss over embeddings, with the gradient w.r.t. the clip vectors.
struct EmbeddingLoss {
  double value = 0.0;
  Matrix grad_clips;  // N x d
};

// sum_i v_i * softmax(-v / gamma)_i. +inf entries get zero weight; the
// result is +inf only when every entry is. Throws on empty input.
double smooth_min(std::span<const double> values, double gamma);

// Same, also writing d(result)/d(values[i]) into `grad`.
double smooth_min(std::span<const double> values, double gamma,
                  std::span<double> grad);

LossValue soft_graph_drop_dtw(const TSortGraph& s, const CostMatrix& c,
                              const DropCosts& d, const SmoothingConfig& cfg);

// Attention pooling of clips relative to one step vector.
std::vector<double> attention_pooling(const EmbeddingSequence& clips,
                                      std::span<const double> step,
                                      double gamma);

// || I - Xhat V^T ||_F where Xhat row i pools the clips against step i.
EmbeddingLoss clustering_loss(const EmbeddingSequence& steps,
                              const EmbeddingSequence& clips, double gamma);

struct CombinedLossConfig {
  SmoothingConfig smoothing;
  double temperature = 0.1;  // cost-matrix softmax temperature
  double drop_percentile = kDefaultDropPercentile;
  DropMode drop_mode = DropMode::kMatrix;
  double clustering_gamma = 0.1;
  double clustering_weight = 1.0;
};

// Soft grounding loss of `s` on costs derived from (steps, clips), plus the
// weighted clustering loss. Step rows follow s's flow-graph step ids in
// ascending order. Gradients flow through the cost softmax and the drop
// percentile back to the clips.
EmbeddingLoss combined_loss(const TSortGraph& s,
                            const EmbeddingSequence& steps,
                            const EmbeddingSequence& clips,
                            const CombinedLossConfig& cfg);

// Affine map applied to every clip vector.
struct ProjectionModel {
  Matrix weight;             // d_out x d_in
  std::vector<double> bias;  // d_out

  static ProjectionModel identity(std::size_t dim);
  EmbeddingSequence apply(const EmbeddingSequence& clips) const;
};

struct TrainingInstance {
  FlowGraph graph;  // normalized
  EmbeddingSequence clips;
  EmbeddingSequence steps;
  std::vector<NodeId> gt_labels;  // optional, used for the accuracy trace
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;      // mean combined loss before the update
  double accuracy = 0.0;  // mean framewise accuracy, NaN without labels
};

struct TrainingOptions {
  double learning_rate = 1e-3;
  int epochs = 50;
  CombinedLossConfig loss;
};

struct TrainingResult {
  ProjectionModel model;
  std::vector<EpochStats> trace;
};

// Full-batch gradient descent on the mean combined loss. Throws Error when
// the loss or gradient becomes non-finite. `on_epoch` may be empty.
TrainingResult train_projection(
    std::span<const TrainingInstance> dataset, ProjectionModel model,
    const TrainingOptions& options,
    const std::function<void(const EpochStats&)>& on_epoch = {});

// Mean framewise accuracy of hard graph grounding with the projected clips.
double evaluate_accuracy(std::span<const TrainingInstance> dataset,
                         const ProjectionModel& model,
                         const CombinedLossConfig& cfg);

}  // namespace flowground

#endif  // FLOWGROUND_SOFT_H_
