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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cornermatch/geometry.hpp"
#include "cornermatch/tensor.hpp"

namespace cornermatch {

/// How raw heatmap values become corner scores before keypoint NMS.
/// `none` is for maps that already hold probabilities (encoder targets,
/// synthesised predictions).
enum class ScoreActivation { channel_softmax, spatial_softmax, sigmoid, none };

/// Predicted maps for one corner kind.
struct CornerMaps {
  Tensor heat;     // (C, H, W)
  Tensor offsets;  // (2, H, W): x, y sub-cell offsets
  Tensor shifts;   // (2, H, W): centripetal shifts, log space
  // (2, H, W): linear cell-to-centre shifts for the centre-regression
  // baseline, in the guiding-shift layout.
  std::optional<Tensor> linear_shifts;
  std::optional<Tensor> embeddings;  // (D, H, W) for associative baselines
};

struct CornerCandidate {
  CornerKind kind = CornerKind::top_left;
  int i = 0;  // heatmap row
  int j = 0;  // heatmap column
  Point pos;  // (cell + local offset) * stride, image pixels
  double score = 0.0;
  int category = 0;
  std::array<double, 2> cs{};
  std::optional<std::array<double, 2>> linear_shift;
  std::vector<double> embedding;
};

struct DecodeConfig {
  int stride = 4;
  int top_k = 100;
  ScoreActivation activation = ScoreActivation::channel_softmax;
};

struct DecodeResult {
  std::vector<CornerCandidate> tl;
  std::vector<CornerCandidate> br;
  std::vector<std::string> warnings;
};

Tensor activate_scores(const Tensor& heat, ScoreActivation activation);

/// Activation, 3x3 keypoint NMS, then the global top-k over all categories
/// and cells. Equal scores are ordered by (category, i, j). Requesting more
/// candidates than cells returns every cell and appends a warning.
std::vector<CornerCandidate> decode_corner_maps(const CornerMaps& maps, CornerKind kind,
                                                const DecodeConfig& cfg,
                                                std::vector<std::string>* warnings = nullptr);

DecodeResult decode_corners(const CornerMaps& tl, const CornerMaps& br,
                            const DecodeConfig& cfg);

/// Centre implied by a candidate's centripetal shift:
/// top-left pos + s*exp(cs), bottom-right pos - s*exp(cs).
Point decode_center(const CornerCandidate& c, int stride);

/// Centre implied by the linear centre-regression shift, measured from the
/// rounded heatmap cell. Throws std::invalid_argument if the candidate has
/// no linear shift.
Point decode_linear_center(const CornerCandidate& c, int stride);

}  // namespace cornermatch
