// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/metrics.h"

#include <map>
#include <string>

namespace flowground {
namespace {

void check_lengths(std::span<const NodeId> pred, std::span<const NodeId> gt) {
  if (pred.size() != gt.size()) {
    throw ValidationError("label sequences differ in length: " +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(gt.size()));
  }
}

bool is_step(NodeId label) { return label >= 0; }

}  // namespace

double framewise_accuracy(std::span<const NodeId> pred,
                          std::span<const NodeId> gt,
                          AccuracyDenominator denominator) {
  check_lengths(pred, gt);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t j = 0; j < gt.size(); ++j) {
    if (denominator == AccuracyDenominator::kAllFrames || is_step(gt[j])) {
      ++total;
    }
    if (is_step(gt[j]) && pred[j] == gt[j]) ++correct;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

double iou(std::span<const NodeId> pred, std::span<const NodeId> gt) {
  check_lengths(pred, gt);
  // Per step: frames in both, frames in either.
  std::map<NodeId, std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t j = 0; j < gt.size(); ++j) {
    const NodeId p = pred[j];
    const NodeId g = gt[j];
    if (is_step(p) && p == g) {
      ++counts[p].first;
      ++counts[p].second;
      continue;
    }
    if (is_step(p)) ++counts[p].second;
    if (is_step(g)) ++counts[g].second;
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (const auto& [id, c] : counts) {
    inter += c.first;
    uni += c.second;
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace flowground
