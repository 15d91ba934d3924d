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
#include <stdexcept>
#include <string>
#include <vector>

#include "cornermatch/decoder.hpp"
#include "cornermatch/geometry.hpp"

namespace cornermatch {

enum class MatchStrategy {
  centripetal,
  center_regression,
  associative_1d,
  associative_2d,
  center_validation,
};

std::string to_string(MatchStrategy s);
/// Accepts the names produced by to_string; throws std::invalid_argument.
MatchStrategy parse_strategy(const std::string& name);

/// Exponent of the centre-agreement weight. `product` is |dx|*|dy| over the
/// central-region area; `euclidean` is (dx/rw)^2 + (dy/rh)^2.
enum class WeightForm { product, euclidean };

struct MatchConfig {
  MuPolicy mu_policy;
  double soft_nms_sigma = 0.5;
  int final_keep = 100;
  double ae_threshold = 0.5;
  MatchStrategy strategy = MatchStrategy::centripetal;
  WeightForm weight_form = WeightForm::product;
  int stride = 4;

  void validate() const;
};

/// A matcher needed an input the candidates do not carry.
class MissingInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CandidatePair {
  std::size_t tl = 0;  // index into the top-left list
  std::size_t br = 0;  // index into the bottom-right list
  BBox box;
  int category = 0;
  double score = 0.0;  // geometric mean of the corner scores
};

struct ScoredBox {
  Detection det;
  double weight = 1.0;
  Point tl_center;
  Point br_center;
};

struct CenterCandidate {
  Point pos;
  int category = 0;
  double score = 0.0;
};

/// Every same-category (tl, br) pair with tl strictly above-left of br.
std::vector<CandidatePair> pair_candidates(std::span<const CornerCandidate> tls,
                                           std::span<const CornerCandidate> brs);

/// Centre-agreement weight of a box given the centres its two corners
/// decode to. Zero unless both centres lie in the mu-scaled central region.
double center_agreement_weight(const BBox& box, Point tl_center, Point br_center,
                               const MuPolicy& policy,
                               WeightForm form = WeightForm::product);

/// center_agreement_weight with centres decoded from centripetal shifts.
double centripetal_weight(const CornerCandidate& tl, const CornerCandidate& br,
                          const MuPolicy& policy, int stride,
                          WeightForm form = WeightForm::product);

// The matchers share pairing, scoring and soft-NMS; they differ only in how a
// pair's weight is decided. Output is sorted by final score, holds at most
// cfg.final_keep boxes, all with score > 0.
std::vector<ScoredBox> match_centripetal(std::span<const CornerCandidate> tls,
                                         std::span<const CornerCandidate> brs,
                                         const MatchConfig& cfg);
std::vector<ScoredBox> match_center_regression(std::span<const CornerCandidate> tls,
                                               std::span<const CornerCandidate> brs,
                                               const MatchConfig& cfg);
std::vector<ScoredBox> match_associative(std::span<const CornerCandidate> tls,
                                         std::span<const CornerCandidate> brs,
                                         const MatchConfig& cfg);
std::vector<ScoredBox> match_center_validation(std::span<const CornerCandidate> tls,
                                               std::span<const CornerCandidate> brs,
                                               std::span<const CenterCandidate> centers,
                                               const MatchConfig& cfg);

/// Dispatches on cfg.strategy.
std::vector<ScoredBox> match(std::span<const CornerCandidate> tls,
                             std::span<const CornerCandidate> brs,
                             std::span<const CenterCandidate> centers,
                             const MatchConfig& cfg);

/// Class-wise Gaussian soft-NMS: repeatedly emits the highest-scoring box
/// (earliest on ties) and multiplies every remaining same-category score by
/// exp(-iou^2 / sigma). Output is in emission order.
std::vector<ScoredBox> soft_nms(std::vector<ScoredBox> boxes, double sigma);
std::vector<Detection> soft_nms(const std::vector<Detection>& dets, double sigma);

}  // namespace cornermatch
