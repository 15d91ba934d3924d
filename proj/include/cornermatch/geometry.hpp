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

#include <stdexcept>

namespace cornermatch {

enum class CornerKind { top_left, bottom_right };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in continuous image coordinates.
///
/// Construction rejects non-finite or degenerate extents, so every BBox in
/// circulation has tlx < brx and tly < bry.
class BBox {
 public:
  BBox(double tlx, double tly, double brx, double bry);

  double tlx() const { return tlx_; }
  double tly() const { return tly_; }
  double brx() const { return brx_; }
  double bry() const { return bry_; }
  double width() const { return brx_ - tlx_; }
  double height() const { return bry_ - tly_; }
  double area() const { return width() * height(); }

  bool contains(Point p) const {
    return p.x >= tlx_ && p.x <= brx_ && p.y >= tly_ && p.y <= bry_;
  }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double tlx_, tly_, brx_, bry_;
};

struct Detection {
  BBox box;
  int category = 0;
  double score = 0.0;
};

/// Chooses the central-region scale from box area.
struct MuPolicy {
  double large_mu = 1.0 / 2.1;
  double small_mu = 1.0 / 2.4;
  double area_threshold = 3500.0;

  /// Throws std::invalid_argument unless both scales lie in (0, 1].
  void validate() const;
};

Point box_center(const BBox& b);

double iou(const BBox& a, const BBox& b);

/// Concentric sub-box whose width and height are mu times the box's.
/// Throws std::invalid_argument for mu outside (0, 1].
BBox central_region(const BBox& b, double mu);

/// large_mu when area is strictly larger than the threshold, else small_mu.
double select_mu(const BBox& b, const MuPolicy& p);

}  // namespace cornermatch
