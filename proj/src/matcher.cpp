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
#include "cornermatch/matcher.hpp"

#include <cmath>
#include <functional>

namespace cornermatch {

namespace {

constexpr struct {
  MatchStrategy strategy;
  const char* name;
} kStrategyNames[] = {
    {MatchStrategy::centripetal, "centripetal"},
    {MatchStrategy::center_regression, "center_regression"},
    {MatchStrategy::associative_1d, "associative_1d"},
    {MatchStrategy::associative_2d, "associative_2d"},
    {MatchStrategy::center_validation, "center_validation"},
};

using WeightFn = std::function<double(const CornerCandidate&, const CornerCandidate&,
                                      const CandidatePair&, ScoredBox&)>;

std::vector<ScoredBox> run_pipeline(std::span<const CornerCandidate> tls,
                                    std::span<const CornerCandidate> brs,
                                    const MatchConfig& cfg, const WeightFn& weigh) {
  cfg.validate();
  std::vector<ScoredBox> boxes;
  for (const auto& pair : pair_candidates(tls, brs)) {
    ScoredBox sb{Detection{pair.box, pair.category, pair.score}, 1.0, {}, {}};
    sb.weight = weigh(tls[pair.tl], brs[pair.br], pair, sb);
    sb.det.score = pair.score * sb.weight;
    // Zero stays zero under soft-NMS decay and is dropped at the end anyway.
    if (sb.det.score > 0.0) boxes.push_back(sb);
  }
  boxes = soft_nms(std::move(boxes), cfg.soft_nms_sigma);
  std::vector<ScoredBox> out;
  for (auto& b : boxes) {
    if (static_cast<int>(out.size()) >= cfg.final_keep) break;
    if (b.det.score > 0.0) out.push_back(b);
  }
  return out;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

}  // namespace

std::string to_string(MatchStrategy s) {
  for (const auto& e : kStrategyNames)
    if (e.strategy == s) return e.name;
  return "unknown";
}

MatchStrategy parse_strategy(const std::string& name) {
  for (const auto& e : kStrategyNames)
    if (name == e.name) return e.strategy;
  throw std::invalid_argument("unknown matching strategy '" + name + "'");
}

void MatchConfig::validate() const {
  mu_policy.validate();
  if (final_keep <= 0) throw std::invalid_argument("final_keep must be positive");
  if (!(soft_nms_sigma > 0.0)) throw std::invalid_argument("soft-NMS sigma must be positive");
  if (ae_threshold < 0.0) throw std::invalid_argument("embedding threshold must be >= 0");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
}

std::vector<CandidatePair> pair_candidates(std::span<const CornerCandidate> tls,
                                           std::span<const CornerCandidate> brs) {
  std::vector<CandidatePair> pairs;
  for (std::size_t a = 0; a < tls.size(); ++a) {
    const auto& tl = tls[a];
    for (std::size_t b = 0; b < brs.size(); ++b) {
      const auto& br = brs[b];
      if (tl.category != br.category) continue;
      if (!(tl.pos.x < br.pos.x && tl.pos.y < br.pos.y)) continue;
      pairs.push_back({a, b, BBox(tl.pos.x, tl.pos.y, br.pos.x, br.pos.y), tl.category,
                       std::sqrt(tl.score * br.score)});
    }
  }
  return pairs;
}

double center_agreement_weight(const BBox& box, Point tl_center, Point br_center,
                               const MuPolicy& policy, WeightForm form) {
  const BBox region = central_region(box, select_mu(box, policy));
  if (!region.contains(tl_center) || !region.contains(br_center)) return 0.0;
  const double dx = std::abs(br_center.x - tl_center.x);
  const double dy = std::abs(br_center.y - tl_center.y);
  if (form == WeightForm::euclidean) {
    const double ux = dx / region.width();
    const double uy = dy / region.height();
    return std::exp(-(ux * ux + uy * uy));
  }
  return std::exp(-(dx * dy) / (region.width() * region.height()));
}

double centripetal_weight(const CornerCandidate& tl, const CornerCandidate& br,
                          const MuPolicy& policy, int stride, WeightForm form) {
  const BBox box(tl.pos.x, tl.pos.y, br.pos.x, br.pos.y);
  return center_agreement_weight(box, decode_center(tl, stride), decode_center(br, stride),
                                 policy, form);
}

std::vector<ScoredBox> match_centripetal(std::span<const CornerCandidate> tls,
                                         std::span<const CornerCandidate> brs,
                                         const MatchConfig& cfg) {
  return run_pipeline(tls, brs, cfg,
                      [&](const CornerCandidate& tl, const CornerCandidate& br,
                          const CandidatePair& pair, ScoredBox& sb) {
                        sb.tl_center = decode_center(tl, cfg.stride);
                        sb.br_center = decode_center(br, cfg.stride);
                        return center_agreement_weight(pair.box, sb.tl_center, sb.br_center,
                                                       cfg.mu_policy, cfg.weight_form);
                      });
}

std::vector<ScoredBox> match_center_regression(std::span<const CornerCandidate> tls,
                                               std::span<const CornerCandidate> brs,
                                               const MatchConfig& cfg) {
  for (const auto* list : {&tls, &brs})
    for (const auto& c : *list)
      if (!c.linear_shift) throw MissingInput("center-regression shifts required");
  return run_pipeline(tls, brs, cfg,
                      [&](const CornerCandidate& tl, const CornerCandidate& br,
                          const CandidatePair& pair, ScoredBox& sb) {
                        sb.tl_center = decode_linear_center(tl, cfg.stride);
                        sb.br_center = decode_linear_center(br, cfg.stride);
                        return center_agreement_weight(pair.box, sb.tl_center, sb.br_center,
                                                       cfg.mu_policy, cfg.weight_form);
                      });
}

std::vector<ScoredBox> match_associative(std::span<const CornerCandidate> tls,
                                         std::span<const CornerCandidate> brs,
                                         const MatchConfig& cfg) {
  std::size_t dim = 0;
  if (cfg.strategy == MatchStrategy::associative_1d) dim = 1;
  if (cfg.strategy == MatchStrategy::associative_2d) dim = 2;
  for (const auto* list : {&tls, &brs})
    for (const auto& c : *list) {
      if (c.embedding.empty()) throw MissingInput("embeddings required");
      if (dim != 0 && c.embedding.size() != dim) {
        throw MissingInput("embeddings required with dimension " + std::to_string(dim));
      }
      if (c.embedding.size() != list->front().embedding.size()) {
        throw MissingInput("embeddings have inconsistent dimensions");
      }
    }
  return run_pipeline(tls, brs, cfg,
                      [&](const CornerCandidate& tl, const CornerCandidate& br,
                          const CandidatePair&, ScoredBox&) {
                        if (tl.embedding.size() != br.embedding.size()) {
                          throw MissingInput("embeddings have inconsistent dimensions");
                        }
                        return l1_distance(tl.embedding, br.embedding) <= cfg.ae_threshold
                                   ? 1.0
                                   : 0.0;
                      });
}

std::vector<ScoredBox> match_center_validation(std::span<const CornerCandidate> tls,
                                               std::span<const CornerCandidate> brs,
                                               std::span<const CenterCandidate> centers,
                                               const MatchConfig& cfg) {
  return run_pipeline(tls, brs, cfg,
                      [&](const CornerCandidate&, const CornerCandidate&,
                          const CandidatePair& pair, ScoredBox&) {
                        const BBox region =
                            central_region(pair.box, select_mu(pair.box, cfg.mu_policy));
                        for (const auto& c : centers) {
                          if (c.category == pair.category && region.contains(c.pos)) return 1.0;
                        }
                        return 0.0;
                      });
}

std::vector<ScoredBox> match(std::span<const CornerCandidate> tls,
                             std::span<const CornerCandidate> brs,
                             std::span<const CenterCandidate> centers,
                             const MatchConfig& cfg) {
  switch (cfg.strategy) {
    case MatchStrategy::centripetal:
      return match_centripetal(tls, brs, cfg);
    case MatchStrategy::center_regression:
      return match_center_regression(tls, brs, cfg);
    case MatchStrategy::associative_1d:
    case MatchStrategy::associative_2d:
      return match_associative(tls, brs, cfg);
    case MatchStrategy::center_validation:
      return match_center_validation(tls, brs, centers, cfg);
  }
  throw std::invalid_argument("unknown matching strategy");
}

std::vector<ScoredBox> soft_nms(std::vector<ScoredBox> boxes, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("soft-NMS sigma must be positive");
  std::vector<ScoredBox> out;
  out.reserve(boxes.size());
  while (!boxes.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < boxes.size(); ++k)
      if (boxes[k].det.score > boxes[best].det.score) best = k;
    ScoredBox picked = boxes[best];
    boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(best));
    for (auto& b : boxes) {
      if (b.det.category != picked.det.category) continue;
      const double o = iou(picked.det.box, b.det.box);
      if (o > 0.0) b.det.score *= std::exp(-(o * o) / sigma);
    }
    out.push_back(std::move(picked));
  }
  return out;
}

std::vector<Detection> soft_nms(const std::vector<Detection>& dets, double sigma) {
  std::vector<ScoredBox> boxes;
  boxes.reserve(dets.size());
  for (const auto& d : dets) boxes.push_back({d, 1.0, {}, {}});
  std::vector<Detection> out;
  for (auto& b : soft_nms(std::move(boxes), sigma)) out.push_back(b.det);
  return out;
}

}  // namespace cornermatch
