/*
 * Copyright 2026 The cornermatch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cornermatch/geometry.hpp"

namespace cornermatch {

struct GroundTruth {
  BBox box;
  int category = 0;
};

/// COCO-style detection metrics. A metric with no ground truth to measure
/// against (for example AP_S on a scene without small objects) is -1.
struct EvalResult {
  double ap = -1, ap50 = -1, ap75 = -1;
  double ap_small = -1, ap_medium = -1, ap_large = -1;
  double ar1 = -1, ar10 = -1, ar100 = -1;
  double ar_small = -1, ar_medium = -1, ar_large = -1;
};

/// For detections already sorted by descending score, the index of the
/// ground truth each one claims at the given IoU threshold, or -1. Each
/// detection takes the highest-IoU unclaimed same-category ground truth with
/// IoU >= threshold.
std::vector<int> greedy_match(std::span<const Detection> dets,
                              std::span<const GroundTruth> gts, double iou_threshold);

/// 101-point interpolated AP from true-positive flags in score order.
/// Returns nullopt when there is no ground truth.
std::optional<double> average_precision(std::span<const bool> matched, int num_gt);

/// COCO protocol: IoU thresholds .50:.05:.95, 101 recall points, size buckets
/// split at 32^2 and 96^2 pixels of ground-truth box area, and per-image,
/// per-category detection caps of 1, 10 and 100. Equal scores keep their
/// input order.
EvalResult evaluate(const std::vector<std::vector<Detection>>& dets,
                    const std::vector<std::vector<GroundTruth>>& gts);

}  // namespace cornermatch
