// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flowground {
namespace {

void normalize_row(std::span<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

// Removes the components along the (orthonormal) rows of `basis`.
void project_out(std::span<double> v, const Matrix& basis, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    const auto b = basis.row(r);
    const double c = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
    for (std::size_t q = 0; q < v.size(); ++q) v[q] -= c * b[q];
  }
}

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SyntheticInstance generate(const FlowGraph& graph, const SynthParams& p) {
  if (p.dim < 2) throw ValidationError("synthetic dim must be >= 2");
  if (p.min_clips_per_step < 1 || p.max_clips_per_step < p.min_clips_per_step) {
    throw ValidationError("clips-per-step range must satisfy 1 <= min <= max");
  }
  if (!(p.background_ratio >= 0.0 && p.background_ratio < 1.0)) {
    throw ValidationError("background ratio must lie in [0, 1)");
  }
  if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma)) {
    throw ValidationError("noise sigma must be non-negative");
  }
  const FlowGraph g = normalize(graph);
  const auto ids = g.step_ids();
  const std::size_t k = ids.size();
  const std::size_t dim = static_cast<std::size_t>(p.dim);
  if (k == 0) throw ValidationError("flow graph has no steps");
  if (dim < k) {
    throw ValidationError("dim " + std::to_string(dim) +
                          " cannot separate " + std::to_string(k) + " steps");
  }

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticInstance inst;
  inst.step_embeddings.kind = EmbeddingSequence::Kind::kStep;
  Matrix& steps = inst.step_embeddings.vectors;
  steps = Matrix(k, dim);
  // Coordinate axes keep noiseless match costs bitwise equal across steps.
  for (std::size_t i = 0; i < k; ++i) steps(i, i) = 1.0;

  const auto sorts = enumerate_topological_sorts(g);
  inst.gt_sort =
      sorts[std::uniform_int_distribution<std::size_t>(0, sorts.size() - 1)(rng)];

  std::vector<std::size_t> row_of(g.size(), 0);
  for (std::size_t i = 0; i < k; ++i) row_of[ids[i]] = i;

  auto noisy = [&](std::span<const double> base, std::span<double> out) {
    for (std::size_t q = 0; q < dim; ++q) {
      out[q] = base[q] + p.noise_sigma * gauss(rng);
    }
    normalize_row(out);
  };

  std::uniform_int_distribution<int> clip_count(p.min_clips_per_step,
                                                p.max_clips_per_step);
  std::vector<NodeId> step_labels;
  for (NodeId id : inst.gt_sort) {
    const int count = clip_count(rng);
    for (int c = 0; c < count; ++c) step_labels.push_back(id);
  }
  const std::size_t step_clips = step_labels.size();
  const auto background = static_cast<std::size_t>(std::lround(
      p.background_ratio * static_cast<double>(step_clips) /
      (1.0 - p.background_ratio)));
  const std::size_t total = step_clips + background;

  std::vector<char> is_background(total, 0);
  std::fill(is_background.begin(), is_background.begin() + background, 1);
  std::shuffle(is_background.begin(), is_background.end(), rng);

  // Background directions: orthogonal to every step when there is room,
  // otherwise opposite to the mean step direction.
  std::vector<double> anti(dim, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t q = 0; q < dim; ++q) anti[q] -= steps(i, q);
  }
  normalize_row(anti);

  inst.clips.kind = EmbeddingSequence::Kind::kClip;
  inst.clips.vectors = Matrix(total, dim);
  inst.gt_labels.assign(total, kDropLabel);
  std::vector<double> base(dim);
  std::size_t next_step = 0;
  for (std::size_t j = 0; j < total; ++j) {
    auto out = inst.clips.vectors.row(j);
    if (is_background[j]) {
      if (dim > k) {
        do {
          for (double& x : base) x = gauss(rng);
          project_out(base, steps, k);
        } while (squared_norm(base) < 1e-12);
        normalize_row(base);
      } else {
        base = anti;
      }
      noisy(base, out);
      continue;
    }
    const NodeId id = step_labels[next_step++];
    inst.gt_labels[j] = id;
    noisy(steps.row(row_of[id]), out);
  }
  return inst;
}

std::vector<SyntheticInstance> generate_many(const FlowGraph& g,
                                             const SynthParams& p, int count) {
  std::vector<SyntheticInstance> out;
  out.reserve(std::max(count, 0));
  for (int i = 0; i < count; ++i) {
    SynthParams q = p;
    q.seed = splitmix64(p.seed + static_cast<std::uint64_t>(i));
    out.push_back(generate(g, q));
  }
  return out;
}

FlowGraph random_flow_graph(int n, double edge_prob, std::mt19937_64& rng) {
  if (n < 0) throw ValidationError("step count must be non-negative");
  std::bernoulli_distribution coin(std::clamp(edge_prob, 0.0, 1.0));
  std::vector<StepNode> nodes;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({i, "step " + std::to_string(i), false});
    for (int j = i + 1; j < n; ++j) {
      // Decided in a fixed (i, j) order so graphs depend only on the seed.
      if (coin(rng)) edges.push_back({i, j});
    }
  }
  return normalize(FlowGraph(std::move(nodes), std::move(edges)));
}

}  // namespace flowground
