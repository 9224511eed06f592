// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic grounded instances: step embeddings, clip sequences and ground
// truth, generated from a flow graph and a seed.

#ifndef FLOWGROUND_SYNTH_H_
#define FLOWGROUND_SYNTH_H_

#include <cstdint>
#include <random>
#include <vector>

#include "flowground/align.h"
#include "flowground/flow_graph.h"

namespace flowground {

struct SynthParams {
  int dim = 16;
  int min_clips_per_step = 2;
  int max_clips_per_step = 5;
  double background_ratio = 0.0;  // fraction of all clips, in [0, 1)
  double noise_sigma = 0.0;       // per-coordinate Gaussian sigma
  std::uint64_t seed = 0;
};

struct SyntheticInstance {
  EmbeddingSequence step_embeddings;  // rows follow graph.step_ids()
  EmbeddingSequence clips;
  std::vector<NodeId> gt_labels;  // step id or kDropLabel for background
  std::vector<NodeId> gt_sort;
};

// Throws ValidationError on bad parameters or when dim < number of steps.
SyntheticInstance generate(const FlowGraph& g, const SynthParams& p);

// Generates `count` instances whose seeds derive from p.seed.
std::vector<SyntheticInstance> generate_many(const FlowGraph& g,
                                             const SynthParams& p, int count);

// Random normalized DAG over n steps: edge i->j (i < j) with probability
// `edge_prob`, so ascending ids are always a valid order.
FlowGraph random_flow_graph(int n, double edge_prob, std::mt19937_64& rng);

}  // namespace flowground

#endif  // FLOWGROUND_SYNTH_H_
