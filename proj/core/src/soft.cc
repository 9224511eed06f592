// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/soft.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flowground/metrics.h"

namespace flowground {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("smoothing gamma must be positive and finite");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Two-element smooth-min, the workhorse of the DP.
double smooth_min2(double a, double b, double gamma, double& ga, double& gb) {
  const double v[2] = {a, b};
  double g[2];
  const double s = smooth_min(v, gamma, g);
  ga = g[0];
  gb = g[1];
  return s;
}

}  // namespace

double smooth_min(std::span<const double> values, double gamma) {
  std::vector<double> grad(values.size());
  return smooth_min(values, gamma, grad);
}

double smooth_min(std::span<const double> values, double gamma,
                  std::span<double> grad) {
  if (values.empty()) throw ValidationError("smooth_min of an empty list");
  check_gamma(gamma);
  double lowest = kInf;
  for (double v : values) {
    if (std::isnan(v)) throw ValidationError("smooth_min input is NaN");
    lowest = std::min(lowest, v);
  }
  if (lowest == kInf) {
    std::fill(grad.begin(), grad.end(), 0.0);
    return kInf;
  }
  // grad doubles as weight storage.
  double z = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    grad[i] = values[i] == kInf ? 0.0 : std::exp(-(values[i] - lowest) / gamma);
    z += grad[i];
  }
  double result = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    grad[i] /= z;
    if (grad[i] > 0.0) result += grad[i] * values[i];
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (grad[i] > 0.0) grad[i] *= 1.0 - (values[i] - result) / gamma;
  }
  return result;
}

LossValue soft_graph_drop_dtw(const TSortGraph& s, const CostMatrix& c,
                              const DropCosts& d, const SmoothingConfig& cfg) {
  check_alignment_inputs(s, c, d);
  check_gamma(cfg.gamma);
  const double gamma = cfg.gamma;
  const int states = static_cast<int>(s.size());
  const int root = s.root();
  const int sink = s.sink();
  const std::size_t n = c.clips();
  const std::size_t width = n + 1;
  auto at = [width](int i, std::size_t j) { return i * width + j; };

  std::vector<std::size_t> row(states, 0);
  std::vector<std::size_t> pred_base(states + 1, 0);
  for (int i = 0; i < states; ++i) {
    if (i > root && i < sink) row[i] = c.row_of(s.node(i).active);
    pred_base[i + 1] = pred_base[i] + s.predecessors(i).size();
  }

  std::vector<double> table(states * width, kInf);
  // Local partial derivatives of each cell, for the reverse pass.
  std::vector<double> d_match(states * width, 0.0);  // dD / dD+
  std::vector<double> d_drop(states * width, 0.0);   // dD / dD-
  std::vector<double> d_preds(states * width, 0.0);  // d smin / d predmin
  std::vector<double> d_stay(states * width, 0.0);   // d smin / dD[i][j-1]
  std::vector<double> pred_w(pred_base[states] * width, 0.0);

  table[at(root, 0)] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    table[at(root, j)] = table[at(root, j - 1)] + d[j - 1];
  }

  const Matrix& cost = c.values();
  std::vector<double> vals, grads;
  for (int i = root + 1; i < sink; ++i) {
    const auto preds = s.predecessors(i);
    vals.resize(preds.size());
    grads.resize(preds.size());
    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t p = 0; p < preds.size(); ++p) {
        vals[p] = table[at(preds[p], j - 1)];
      }
      const double pred_min = smooth_min(vals, gamma, grads);
      std::copy(grads.begin(), grads.end(),
                pred_w.begin() + (pred_base[i] * width + j * preds.size()));
      const double here = table[at(i, j - 1)];
      const double inner =
          smooth_min2(pred_min, here, gamma, d_preds[at(i, j)],
                      d_stay[at(i, j)]);
      const double match = cost(row[i], j - 1) + inner;
      const double drop = d[j - 1] + here;
      table[at(i, j)] = smooth_min2(match, drop, gamma, d_match[at(i, j)],
                                    d_drop[at(i, j)]);
    }
  }

  const auto finals = s.predecessors(sink);
  vals.resize(finals.size());
  grads.resize(finals.size());
  for (std::size_t p = 0; p < finals.size(); ++p) {
    vals[p] = table[at(finals[p], n)];
  }
  LossValue out;
  out.value = smooth_min(vals, gamma, grads);
  if (!std::isfinite(out.value)) throw InfeasibleError("no feasible alignment");

  std::vector<double> adj(states * width, 0.0);
  for (std::size_t p = 0; p < finals.size(); ++p) {
    adj[at(finals[p], n)] += grads[p];
  }
  out.grad_costs = Matrix(c.steps(), n, 0.0);
  out.grad_drops.assign(n, 0.0);

  for (int i = sink - 1; i > root; --i) {
    const auto preds = s.predecessors(i);
    for (std::size_t j = n; j >= 1; --j) {
      const double a = adj[at(i, j)];
      if (a == 0.0) continue;
      const double a_match = a * d_match[at(i, j)];
      const double a_drop = a * d_drop[at(i, j)];
      out.grad_costs(row[i], j - 1) += a_match;
      out.grad_drops[j - 1] += a_drop;
      adj[at(i, j - 1)] += a_drop + a_match * d_stay[at(i, j)];
      const double a_preds = a_match * d_preds[at(i, j)];
      if (a_preds == 0.0) continue;
      const double* w = pred_w.data() + pred_base[i] * width + j * preds.size();
      for (std::size_t p = 0; p < preds.size(); ++p) {
        adj[at(preds[p], j - 1)] += a_preds * w[p];
      }
    }
  }
  for (std::size_t j = n; j >= 1; --j) {
    out.grad_drops[j - 1] += adj[at(root, j)];
    adj[at(root, j - 1)] += adj[at(root, j)];
  }
  return out;
}

std::vector<double> attention_pooling(const EmbeddingSequence& clips,
                                      std::span<const double> step,
                                      double gamma) {
  check_gamma(gamma);
  if (clips.count() == 0) throw ValidationError("attention over no clips");
  if (clips.dim() != step.size()) {
    throw ValidationError("attention pooling dimension mismatch");
  }
  const std::size_t n = clips.count();
  std::vector<double> logits(n);
  for (std::size_t j = 0; j < n; ++j) {
    logits[j] = dot(clips.vectors.row(j), step) / gamma;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    z += l;
  }
  std::vector<double> pooled(clips.dim(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = clips.vectors.row(j);
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      pooled[k] += logits[j] / z * x[k];
    }
  }
  return pooled;
}

EmbeddingLoss clustering_loss(const EmbeddingSequence& steps,
                              const EmbeddingSequence& clips, double gamma) {
  check_gamma(gamma);
  if (steps.count() == 0) throw ValidationError("clustering needs steps");
  if (clips.count() == 0) throw ValidationError("clustering needs clips");
  if (steps.dim() != clips.dim()) {
    throw ValidationError("clustering loss dimension mismatch");
  }
  const std::size_t k = steps.count();
  const std::size_t n = clips.count();
  const std::size_t dim = steps.dim();
  const Matrix& v = steps.vectors;
  const Matrix& x = clips.vectors;

  Matrix attn(k, n);
  Matrix pooled(k, dim, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double top = -kInf;
    for (std::size_t j = 0; j < n; ++j) {
      attn(i, j) = dot(x.row(j), v.row(i)) / gamma;
      top = std::max(top, attn(i, j));
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      attn(i, j) = std::exp(attn(i, j) - top);
      z += attn(i, j);
    }
    for (std::size_t j = 0; j < n; ++j) {
      attn(i, j) /= z;
      for (std::size_t q = 0; q < dim; ++q) pooled(i, q) += attn(i, j) * x(j, q);
    }
  }

  Matrix residual(k, k);
  double sq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < k; ++m) {
      residual(i, m) = (i == m ? 1.0 : 0.0) - dot(pooled.row(i), v.row(m));
      sq += residual(i, m) * residual(i, m);
    }
  }
  EmbeddingLoss out;
  out.value = std::sqrt(sq);
  out.grad_clips = Matrix(n, dim, 0.0);
  if (out.value == 0.0) return out;

  // dL/dpooled_i = -sum_m residual(i, m) / L * v_m
  Matrix g_pooled(k, dim, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < k; ++m) {
      const double r = residual(i, m) / out.value;
      for (std::size_t q = 0; q < dim; ++q) g_pooled(i, q) -= r * v(m, q);
    }
  }
  std::vector<double> proj(n);
  for (std::size_t i = 0; i < k; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      proj[j] = dot(g_pooled.row(i), x.row(j));
      mean += attn(i, j) * proj[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double a = attn(i, j);
      const double through_logit = a * (proj[j] - mean) / gamma;
      for (std::size_t q = 0; q < dim; ++q) {
        out.grad_clips(j, q) += a * g_pooled(i, q) + through_logit * v(i, q);
      }
    }
  }
  return out;
}

EmbeddingLoss combined_loss(const TSortGraph& s,
                            const EmbeddingSequence& steps,
                            const EmbeddingSequence& clips,
                            const CombinedLossConfig& cfg) {
  const auto ids = s.step_ids();
  if (ids.size() != steps.count()) {
    throw ValidationError("graph has " + std::to_string(ids.size()) +
                          " steps but " + std::to_string(steps.count()) +
                          " step embeddings were given");
  }
  const CostMatrix costs =
      compute_cost_matrix(steps, clips, cfg.temperature, ids);
  const Matrix& cm = costs.values();
  const std::size_t k = cm.rows();
  const std::size_t n = cm.cols();

  DropCosts drops(n);
  std::vector<PercentileTerms> terms;
  if (cfg.drop_mode == DropMode::kMatrix) {
    terms.push_back(percentile_terms(cm.flat(), cfg.drop_percentile));
    std::fill(drops.begin(), drops.end(), terms[0].value);
  } else {
    std::vector<double> column(k);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < k; ++i) column[i] = cm(i, j);
      terms.push_back(percentile_terms(column, cfg.drop_percentile));
      drops[j] = terms.back().value;
    }
  }

  const LossValue grounding =
      soft_graph_drop_dtw(s, costs, drops, cfg.smoothing);
  Matrix g_cost = grounding.grad_costs;
  if (cfg.drop_mode == DropMode::kMatrix) {
    const double total = std::accumulate(grounding.grad_drops.begin(),
                                         grounding.grad_drops.end(), 0.0);
    g_cost.flat()[terms[0].lower] += (1.0 - terms[0].upper_weight) * total;
    g_cost.flat()[terms[0].upper] += terms[0].upper_weight * total;
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = grounding.grad_drops[j];
      g_cost(terms[j].lower, j) += (1.0 - terms[j].upper_weight) * g;
      g_cost(terms[j].upper, j) += terms[j].upper_weight * g;
    }
  }

  // C = logsumexp(s) - s with s = <x, v> / temperature, column-wise.
  EmbeddingLoss out;
  out.value = grounding.value;
  out.grad_clips = Matrix(n, clips.dim(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < k; ++i) col += g_cost(i, j);
    auto gx = out.grad_clips.row(j);
    for (std::size_t i = 0; i < k; ++i) {
      const double g_score =
          (std::exp(-cm(i, j)) * col - g_cost(i, j)) / cfg.temperature;
      const auto vi = steps.vectors.row(i);
      for (std::size_t q = 0; q < gx.size(); ++q) gx[q] += g_score * vi[q];
    }
  }

  if (cfg.clustering_weight != 0.0) {
    const EmbeddingLoss clust =
        clustering_loss(steps, clips, cfg.clustering_gamma);
    out.value += cfg.clustering_weight * clust.value;
    auto dst = out.grad_clips.flat();
    const auto src = clust.grad_clips.flat();
    for (std::size_t q = 0; q < dst.size(); ++q) {
      dst[q] += cfg.clustering_weight * src[q];
    }
  }
  return out;
}

ProjectionModel ProjectionModel::identity(std::size_t dim) {
  ProjectionModel m;
  m.weight = Matrix(dim, dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m.weight(i, i) = 1.0;
  m.bias.assign(dim, 0.0);
  return m;
}

EmbeddingSequence ProjectionModel::apply(const EmbeddingSequence& clips) const {
  if (clips.dim() != weight.cols() || bias.size() != weight.rows()) {
    throw ValidationError("projection does not match the clip dimension");
  }
  EmbeddingSequence out;
  out.kind = clips.kind;
  out.vectors = Matrix(clips.count(), weight.rows());
  for (std::size_t j = 0; j < clips.count(); ++j) {
    const auto x = clips.vectors.row(j);
    for (std::size_t o = 0; o < weight.rows(); ++o) {
      out.vectors(j, o) = bias[o] + dot(weight.row(o), x);
    }
  }
  return out;
}

namespace {

double instance_accuracy(const TSortGraph& s, const TrainingInstance& inst,
                         const EmbeddingSequence& projected,
                         const CombinedLossConfig& cfg) {
  const CostMatrix costs = compute_cost_matrix(inst.steps, projected,
                                               cfg.temperature, s.step_ids());
  const DropCosts drops =
      compute_drop_costs(costs, cfg.drop_percentile, cfg.drop_mode);
  const Alignment a = graph_drop_dtw(s, costs, drops);
  return framewise_accuracy(a.labels, inst.gt_labels);
}

}  // namespace

TrainingResult train_projection(
    std::span<const TrainingInstance> dataset, ProjectionModel model,
    const TrainingOptions& options,
    const std::function<void(const EpochStats&)>& on_epoch) {
  if (dataset.empty()) throw ValidationError("training set is empty");
  if (options.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!std::isfinite(options.learning_rate)) {
    throw ValidationError("learning rate must be finite");
  }
  std::vector<TSortGraph> graphs;
  graphs.reserve(dataset.size());
  for (const auto& inst : dataset) graphs.push_back(build_tsort_forward(inst.graph));

  const std::size_t d_out = model.weight.rows();
  const std::size_t d_in = model.weight.cols();
  TrainingResult result;

  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    Matrix g_weight(d_out, d_in, 0.0);
    std::vector<double> g_bias(d_out, 0.0);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    int acc_count = 0;
    for (std::size_t t = 0; t < dataset.size(); ++t) {
      const auto& inst = dataset[t];
      const EmbeddingSequence projected = model.apply(inst.clips);
      const EmbeddingLoss loss =
          combined_loss(graphs[t], inst.steps, projected, options.loss);
      loss_sum += loss.value;
      for (std::size_t j = 0; j < projected.count(); ++j) {
        const auto gy = loss.grad_clips.row(j);
        const auto x = inst.clips.vectors.row(j);
        for (std::size_t o = 0; o < d_out; ++o) {
          g_bias[o] += gy[o];
          for (std::size_t q = 0; q < d_in; ++q) g_weight(o, q) += gy[o] * x[q];
        }
      }
      if (!inst.gt_labels.empty()) {
        acc_sum += instance_accuracy(graphs[t], inst, projected, options.loss);
        ++acc_count;
      }
    }
    const double scale = 1.0 / static_cast<double>(dataset.size());
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum * scale;
    stats.accuracy = acc_count ? acc_sum / acc_count
                               : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(stats.loss)) {
      throw Error("training diverged at epoch " + std::to_string(epoch) +
                  ": mean loss is " + std::to_string(stats.loss));
    }
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (epoch == options.epochs) break;

    for (std::size_t o = 0; o < d_out; ++o) {
      model.bias[o] -= options.learning_rate * g_bias[o] * scale;
      for (std::size_t q = 0; q < d_in; ++q) {
        model.weight(o, q) -= options.learning_rate * g_weight(o, q) * scale;
      }
    }
    for (double w : model.weight.flat()) {
      if (!std::isfinite(w)) {
        throw Error("training diverged at epoch " + std::to_string(epoch) +
                    ": non-finite parameters");
      }
    }
  }
  result.model = std::move(model);
  return result;
}

double evaluate_accuracy(std::span<const TrainingInstance> dataset,
                         const ProjectionModel& model,
                         const CombinedLossConfig& cfg) {
  double sum = 0.0;
  int count = 0;
  for (const auto& inst : dataset) {
    if (inst.gt_labels.empty()) continue;
    const TSortGraph s = build_tsort_forward(inst.graph);
    sum += instance_accuracy(s, inst, model.apply(inst.clips), cfg);
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / count;
}

}  // namespace flowground
