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
#include "cornermatch/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "cornermatch/kernels.hpp"

namespace cornermatch {

namespace {

struct Entry {
  float score;
  int c, i, j;
};

// Strict "ranks before" ordering: higher score first, then (c, i, j).
bool ranks_before(const Entry& a, const Entry& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.c, a.i, a.j) < std::tie(b.c, b.i, b.j);
}

void check_aux(const Tensor& t, const Tensor& heat, int channels, const char* what) {
  if ((channels > 0 && t.channels() != channels) || t.height() != heat.height() ||
      t.width() != heat.width()) {
    throw ShapeError(std::string("decode: ") + what + " map shape does not match heatmap");
  }
}

}  // namespace

Tensor activate_scores(const Tensor& heat, ScoreActivation activation) {
  switch (activation) {
    case ScoreActivation::channel_softmax:
      return softmax_scores(heat, SoftmaxAxis::channel);
    case ScoreActivation::spatial_softmax:
      return softmax_scores(heat, SoftmaxAxis::spatial);
    case ScoreActivation::sigmoid:
      return sigmoid_scores(heat);
    case ScoreActivation::none:
      return heat;
  }
  return heat;
}

std::vector<CornerCandidate> decode_corner_maps(const CornerMaps& maps, CornerKind kind,
                                                const DecodeConfig& cfg,
                                                std::vector<std::string>* warnings) {
  if (cfg.stride < 1) throw std::invalid_argument("decode: stride must be >= 1");
  if (cfg.top_k < 0) throw std::invalid_argument("decode: top_k must be >= 0");
  const Tensor& heat = maps.heat;
  check_aux(maps.offsets, heat, 2, "offset");
  check_aux(maps.shifts, heat, 2, "centripetal shift");
  if (maps.linear_shifts) check_aux(*maps.linear_shifts, heat, 2, "linear shift");
  if (maps.embeddings) check_aux(*maps.embeddings, heat, 0, "embedding");

  const Tensor scores = nms_maxpool3(activate_scores(heat, cfg.activation));
  const std::size_t cells = scores.size();
  std::size_t k = static_cast<std::size_t>(cfg.top_k);
  if (k > cells) {
    if (warnings) {
      warnings->push_back("top_k " + std::to_string(cfg.top_k) + " exceeds " +
                          std::to_string(cells) + " heatmap cells; returning all cells");
    }
    k = cells;
  }

  // Bounded heap holding the best k entries; its front is the worst of them.
  std::vector<Entry> heap;
  heap.reserve(k + 1);
  if (k > 0) {
    const auto data = scores.data();
    const int h = scores.height(), w = scores.width();
    std::size_t idx = 0;
    for (int c = 0; c < scores.channels(); ++c)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j, ++idx) {
          // Cells arrive in (c, i, j) order, so a full heap only admits a
          // strictly higher score.
          if (heap.size() == k && !(data[idx] > heap.front().score)) continue;
          const Entry e{data[idx], c, i, j};
          if (heap.size() < k) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end(), ranks_before);
          } else if (ranks_before(e, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), ranks_before);
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end(), ranks_before);
          }
        }
  }
  std::sort(heap.begin(), heap.end(), ranks_before);

  const double s = cfg.stride;
  std::vector<CornerCandidate> out;
  out.reserve(heap.size());
  for (const Entry& e : heap) {
    CornerCandidate cand;
    cand.kind = kind;
    cand.i = e.i;
    cand.j = e.j;
    cand.category = e.c;
    cand.score = e.score;
    cand.pos = {(e.j + static_cast<double>(maps.offsets.at(0, e.i, e.j))) * s,
                (e.i + static_cast<double>(maps.offsets.at(1, e.i, e.j))) * s};
    cand.cs = {maps.shifts.at(0, e.i, e.j), maps.shifts.at(1, e.i, e.j)};
    if (maps.linear_shifts) {
      cand.linear_shift = std::array<double, 2>{maps.linear_shifts->at(0, e.i, e.j),
                                                maps.linear_shifts->at(1, e.i, e.j)};
    }
    if (maps.embeddings) {
      cand.embedding.reserve(maps.embeddings->channels());
      for (int d = 0; d < maps.embeddings->channels(); ++d)
        cand.embedding.push_back(maps.embeddings->at(d, e.i, e.j));
    }
    out.push_back(std::move(cand));
  }
  return out;
}

DecodeResult decode_corners(const CornerMaps& tl, const CornerMaps& br,
                            const DecodeConfig& cfg) {
  require_same_shape(tl.heat, br.heat, "decode_corners heatmaps");
  DecodeResult r;
  r.tl = decode_corner_maps(tl, CornerKind::top_left, cfg, &r.warnings);
  r.br = decode_corner_maps(br, CornerKind::bottom_right, cfg, &r.warnings);
  return r;
}

Point decode_center(const CornerCandidate& c, int stride) {
  const double dx = stride * std::exp(c.cs[0]);
  const double dy = stride * std::exp(c.cs[1]);
  if (c.kind == CornerKind::top_left) return {c.pos.x + dx, c.pos.y + dy};
  return {c.pos.x - dx, c.pos.y - dy};
}

Point decode_linear_center(const CornerCandidate& c, int stride) {
  if (!c.linear_shift) {
    throw std::invalid_argument("candidate carries no centre-regression shift");
  }
  const auto& d = *c.linear_shift;
  if (c.kind == CornerKind::top_left) {
    return {(c.j + d[0]) * stride, (c.i + d[1]) * stride};
  }
  return {(c.j - d[0]) * stride, (c.i - d[1]) * stride};
}

}  // namespace cornermatch
