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
#include "cornermatch/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace cornermatch {

namespace {

int map_extent(int pixels, int stride) { return (pixels + stride - 1) / stride; }

void require_stride(int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
}

struct CornerCells {
  int tl_i, tl_j, br_i, br_j;
};

CornerCells cells_of(const BBox& b, int stride, int mh, int mw) {
  return {corner_cell(b.tly(), stride, mh), corner_cell(b.tlx(), stride, mw),
          corner_cell(b.bry(), stride, mh), corner_cell(b.brx(), stride, mw)};
}

std::string object_name(std::size_t k) { return "object " + std::to_string(k); }

}  // namespace

void validate_scene(const Scene& scene) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw SceneError("image size must be positive");
  }
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& o = scene.objects[k];
    const auto& b = o.box;
    if (b.tlx() < 0 || b.tly() < 0 || b.brx() > scene.width || b.bry() > scene.height) {
      throw SceneError(object_name(k) + " outside image");
    }
    if (o.category < 0) throw SceneError(object_name(k) + " has a negative category");
    if (o.mask && o.mask->size() != 28u * 28u) {
      throw SceneError(object_name(k) + " mask must have 28x28 values");
    }
  }
}

int infer_num_categories(const Scene& scene) {
  int n = 1;
  for (const auto& o : scene.objects) n = std::max(n, o.category + 1);
  return n;
}

double gaussian_radius(double width, double height, double min_overlap) {
  // Case 1: both corners shift outward/inward together.
  const double b1 = height + width;
  const double c1 = width * height * (1 - min_overlap) / (1 + min_overlap);
  const double r1 = (b1 - std::sqrt(b1 * b1 - 4 * c1)) / 2;
  // Case 2: both corners shift inward.
  const double b2 = 2 * (height + width);
  const double c2 = (1 - min_overlap) * width * height;
  const double r2 = (b2 - std::sqrt(b2 * b2 - 16 * c2)) / 8;
  // Case 3: both corners shift outward.
  const double a3 = 4 * min_overlap;
  const double b3 = -2 * min_overlap * (height + width);
  const double c3 = (min_overlap - 1) * width * height;
  const double r3 = (b3 + std::sqrt(b3 * b3 - 4 * a3 * c3)) / (2 * a3);
  return std::min({r1, r2, r3});
}

void draw_gaussian(Tensor& heat, int c, int i, int j, int radius, float peak) {
  const double sigma = (2.0 * radius + 1.0) / 6.0;
  for (int di = -radius; di <= radius; ++di) {
    for (int dj = -radius; dj <= radius; ++dj) {
      if (!heat.in_bounds(i + di, j + dj)) continue;
      const double g = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      float& cell = heat.at(c, i + di, j + dj);
      cell = std::max(cell, static_cast<float>(peak * g));
    }
  }
}

int corner_cell(double v, int stride, int cells) {
  const int cell = static_cast<int>(std::floor(v / stride));
  if (cell == cells && v == static_cast<double>(cells) * stride) return cells - 1;
  if (cell < 0 || cell >= cells) {
    throw SceneError("corner coordinate " + std::to_string(v) + " outside map");
  }
  return cell;
}

CornerPair encode_heatmaps(const Scene& scene, const EncoderConfig& cfg) {
  require_stride(cfg.stride);
  validate_scene(scene);
  const int s = cfg.stride;
  const int mh = map_extent(scene.height, s), mw = map_extent(scene.width, s);
  const int nc = cfg.num_categories > 0 ? cfg.num_categories : infer_num_categories(scene);
  CornerPair out{Tensor(nc, mh, mw), Tensor(nc, mh, mw)};
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& o = scene.objects[k];
    if (o.category >= nc) {
      throw SceneError(object_name(k) + " category exceeds the configured category count");
    }
    const auto cells = cells_of(o.box, s, mh, mw);
    int radius = cfg.radius.fixed_radius;
    if (cfg.radius.mode == RadiusPolicy::Mode::iou) {
      const double r = gaussian_radius(o.box.width() / s, o.box.height() / s,
                                       cfg.radius.min_overlap);
      radius = std::max(0, static_cast<int>(r));
    }
    draw_gaussian(out.tl, o.category, cells.tl_i, cells.tl_j, radius);
    draw_gaussian(out.br, o.category, cells.br_i, cells.br_j, radius);
  }
  return out;
}

CornerPair encode_local_offsets(const Scene& scene, int stride) {
  require_stride(stride);
  validate_scene(scene);
  const int mh = map_extent(scene.height, stride), mw = map_extent(scene.width, stride);
  CornerPair out{Tensor(2, mh, mw), Tensor(2, mh, mw)};
  for (const auto& o : scene.objects) {
    const auto cells = cells_of(o.box, stride, mh, mw);
    out.tl.at(0, cells.tl_i, cells.tl_j) = static_cast<float>(o.box.tlx() / stride - cells.tl_j);
    out.tl.at(1, cells.tl_i, cells.tl_j) = static_cast<float>(o.box.tly() / stride - cells.tl_i);
    out.br.at(0, cells.br_i, cells.br_j) = static_cast<float>(o.box.brx() / stride - cells.br_j);
    out.br.at(1, cells.br_i, cells.br_j) = static_cast<float>(o.box.bry() / stride - cells.br_i);
  }
  return out;
}

std::array<double, 2> centripetal_shift(const BBox& b, CornerKind kind, int stride) {
  require_stride(stride);
  const Point ct = box_center(b);
  const double dx = kind == CornerKind::top_left ? ct.x - b.tlx() : b.brx() - ct.x;
  const double dy = kind == CornerKind::top_left ? ct.y - b.tly() : b.bry() - ct.y;
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::domain_error("non-positive centripetal shift");
  return {std::log(dx / stride), std::log(dy / stride)};
}

std::array<double, 2> guiding_shift(const BBox& b, CornerKind kind, int stride) {
  require_stride(stride);
  const Point ct = box_center(b);
  const double s = stride;
  if (kind == CornerKind::top_left) {
    return {ct.x / s - std::floor(b.tlx() / s), ct.y / s - std::floor(b.tly() / s)};
  }
  return {std::floor(b.brx() / s) - ct.x / s, std::floor(b.bry() / s) - ct.y / s};
}

CornerPair encode_centripetal_shifts(const Scene& scene, int stride) {
  require_stride(stride);
  validate_scene(scene);
  const int mh = map_extent(scene.height, stride), mw = map_extent(scene.width, stride);
  CornerPair out{Tensor(2, mh, mw), Tensor(2, mh, mw)};
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& b = scene.objects[k].box;
    const Point ct = box_center(b);
    const double args[4] = {(ct.x - b.tlx()) / stride, (ct.y - b.tly()) / stride,
                            (b.brx() - ct.x) / stride, (b.bry() - ct.y) / stride};
    for (double a : args) {
      if (!(a > 0.0)) {
        throw EncodingDegenerate(static_cast<int>(k),
                                 object_name(k) + " has a non-positive centripetal shift");
      }
    }
    const auto cells = cells_of(b, stride, mh, mw);
    out.tl.at(0, cells.tl_i, cells.tl_j) = static_cast<float>(std::log(args[0]));
    out.tl.at(1, cells.tl_i, cells.tl_j) = static_cast<float>(std::log(args[1]));
    out.br.at(0, cells.br_i, cells.br_j) = static_cast<float>(std::log(args[2]));
    out.br.at(1, cells.br_i, cells.br_j) = static_cast<float>(std::log(args[3]));
  }
  return out;
}

CornerPair encode_guiding_shifts(const Scene& scene, int stride) {
  require_stride(stride);
  validate_scene(scene);
  const int mh = map_extent(scene.height, stride), mw = map_extent(scene.width, stride);
  CornerPair out{Tensor(2, mh, mw), Tensor(2, mh, mw)};
  for (const auto& o : scene.objects) {
    const Point ct = box_center(o.box);
    const auto cells = cells_of(o.box, stride, mh, mw);
    // Top-left points down-right to the centre; bottom-right stores the
    // mirrored magnitude, so centre = cell - shift there.
    out.tl.at(0, cells.tl_i, cells.tl_j) = static_cast<float>(ct.x / stride - cells.tl_j);
    out.tl.at(1, cells.tl_i, cells.tl_j) = static_cast<float>(ct.y / stride - cells.tl_i);
    out.br.at(0, cells.br_i, cells.br_j) = static_cast<float>(cells.br_j - ct.x / stride);
    out.br.at(1, cells.br_i, cells.br_j) = static_cast<float>(cells.br_i - ct.y / stride);
  }
  return out;
}

TargetMaps encode_targets(const Scene& scene, const EncoderConfig& cfg) {
  TargetMaps t;
  t.stride = cfg.stride;
  auto heat = encode_heatmaps(scene, cfg);
  t.num_categories = heat.tl.channels();
  auto off = encode_local_offsets(scene, cfg.stride);
  auto cs = encode_centripetal_shifts(scene, cfg.stride);
  auto guide = encode_guiding_shifts(scene, cfg.stride);
  const int mh = heat.tl.height(), mw = heat.tl.width();
  t.tl = {std::move(heat.tl), std::move(off.tl), std::move(cs.tl), std::move(guide.tl),
          Tensor(1, mh, mw)};
  t.br = {std::move(heat.br), std::move(off.br), std::move(cs.br), std::move(guide.br),
          Tensor(1, mh, mw)};
  std::vector<float> masks;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& o = scene.objects[k];
    const auto cells = cells_of(o.box, cfg.stride, mh, mw);
    t.tl.valid.at(0, cells.tl_i, cells.tl_j) = 1.0f;
    t.br.valid.at(0, cells.br_i, cells.br_j) = 1.0f;
    if (o.mask) {
      masks.insert(masks.end(), o.mask->begin(), o.mask->end());
      t.mask_objects.push_back(static_cast<int>(k));
    }
  }
  t.masks = Tensor(Shape{static_cast<int>(t.mask_objects.size()), 28, 28}, std::move(masks));
  return t;
}

std::vector<EncodabilityFlag> validate_center_regression_encodable(
    const Scene& scene, int stride) {
  require_stride(stride);
  validate_scene(scene);
  const int mh = map_extent(scene.height, stride), mw = map_extent(scene.width, stride);
  std::vector<EncodabilityFlag> flags;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& b = scene.objects[k].box;
    const Point ct = box_center(b);
    const auto cells = cells_of(b, stride, mh, mw);
    const double offsets[4] = {ct.x / stride - cells.tl_j, ct.y / stride - cells.tl_i,
                               cells.br_j - ct.x / stride, cells.br_i - ct.y / stride};
    for (int q = 0; q < 4; ++q) {
      if (offsets[q] <= 0.0) {
        flags.push_back({static_cast<int>(k),
                         q < 2 ? CornerKind::top_left : CornerKind::bottom_right, q % 2,
                         offsets[q]});
      }
    }
  }
  return flags;
}

}  // namespace cornermatch
