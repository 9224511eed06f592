// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/metrics.h"

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace flowground {
namespace {

using Labels = std::vector<NodeId>;
constexpr NodeId kBg = -1;

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{1, 2, 3}, Labels{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{kBg, kBg}, Labels{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{1, 2, 2, kBg}, Labels{1, 1, 2, kBg}),
                   0.5);
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{1, 2, 2, kBg}, Labels{1, 1, 2, kBg},
                                      AccuracyDenominator::kStepFrames),
                   2.0 / 3.0);
}

TEST(Accuracy, EdgeCases) {
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{}, Labels{}), 0.0);
  EXPECT_DOUBLE_EQ(framewise_accuracy(Labels{kBg}, Labels{kBg},
                                      AccuracyDenominator::kStepFrames),
                   0.0);
  EXPECT_THROW(framewise_accuracy(Labels{1}, Labels{1, 2}), ValidationError);
}

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou(Labels{1, 2, kBg}, Labels{1, 2, kBg}), 1.0);
  EXPECT_DOUBLE_EQ(iou(Labels{1, 1, 2, 2}, Labels{2, 2, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(iou(Labels{kBg, 1, 1}, Labels{1, 1, kBg}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(Labels{kBg}, Labels{kBg}), 0.0);
  EXPECT_THROW(iou(Labels{1}, Labels{}), ValidationError);
}

TEST(Metrics, RelabelingInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> label(-1, 3);
  const std::vector<NodeId> relabel{7, 2, 9, 4};
  for (int trial = 0; trial < 100; ++trial) {
    Labels pred(12), gt(12);
    for (auto& l : pred) l = label(rng);
    for (auto& l : gt) l = label(rng);
    Labels pred2 = pred, gt2 = gt;
    for (auto& l : pred2) if (l >= 0) l = relabel[l];
    for (auto& l : gt2) if (l >= 0) l = relabel[l];
    EXPECT_DOUBLE_EQ(framewise_accuracy(pred, gt), framewise_accuracy(pred2, gt2));
    EXPECT_DOUBLE_EQ(iou(pred, gt), iou(pred2, gt2));
    const double a = framewise_accuracy(pred, gt);
    const double b = iou(pred, gt);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
    bool has_step = false;
    for (auto l : gt) has_step |= l >= 0;
    if (has_step) EXPECT_DOUBLE_EQ(iou(gt, gt), 1.0);
  }
}

}  // namespace
}  // namespace flowground
