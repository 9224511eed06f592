// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FLOWGROUND_METRICS_H_
#define FLOWGROUND_METRICS_H_

#include <span>

#include "flowground/errors.h"
#include "flowground/types.h"

namespace flowground {

// Labels are step ids; kDropLabel (-1) marks background / dropped frames.
enum class AccuracyDenominator {
  kAllFrames,  // default
  kStepFrames,  // only frames whose ground truth is a step
};

// Frames predicted with their correct step label (background never counts
// as correct) over the chosen denominator. Returns 0 when the denominator
// is empty.
double framewise_accuracy(std::span<const NodeId> pred,
                          std::span<const NodeId> gt,
                          AccuracyDenominator denominator =
                              AccuracyDenominator::kAllFrames);

// Sum over steps of |pred_s & gt_s| divided by the sum of |pred_s | gt_s|.
// Returns 0 when neither sequence contains a step frame.
double iou(std::span<const NodeId> pred, std::span<const NodeId> gt);

}  // namespace flowground

#endif  // FLOWGROUND_METRICS_H_
