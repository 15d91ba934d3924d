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
#include "cornermatch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cornermatch {

BBox::BBox(double tlx, double tly, double brx, double bry)
    : tlx_(tlx), tly_(tly), brx_(brx), bry_(bry) {
  if (!std::isfinite(tlx) || !std::isfinite(tly) || !std::isfinite(brx) ||
      !std::isfinite(bry)) {
    throw std::invalid_argument("bbox has non-finite coordinates");
  }
  if (!(tlx < brx) || !(tly < bry)) {
    throw std::invalid_argument(
        "degenerate bbox (" + std::to_string(tlx) + ", " + std::to_string(tly) +
        ", " + std::to_string(brx) + ", " + std::to_string(bry) + ")");
  }
}

void MuPolicy::validate() const {
  auto ok = [](double mu) { return mu > 0.0 && mu <= 1.0; };
  if (!ok(large_mu) || !ok(small_mu)) {
    throw std::invalid_argument("mu must lie in (0, 1]");
  }
}

Point box_center(const BBox& b) {
  return {(b.tlx() + b.brx()) / 2.0, (b.tly() + b.bry()) / 2.0};
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.brx(), b.brx()) - std::max(a.tlx(), b.tlx());
  const double ih = std::min(a.bry(), b.bry()) - std::max(a.tly(), b.tly());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

BBox central_region(const BBox& b, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw std::invalid_argument("central region scale must lie in (0, 1], got " +
                                std::to_string(mu));
  }
  const double cx = (b.tlx() + b.brx()) / 2.0;
  const double cy = (b.tly() + b.bry()) / 2.0;
  const double hw = (b.brx() - b.tlx()) / 2.0 * mu;
  const double hh = (b.bry() - b.tly()) / 2.0 * mu;
  return BBox(cx - hw, cy - hh, cx + hw, cy + hh);
}

double select_mu(const BBox& b, const MuPolicy& p) {
  return b.area() > p.area_threshold ? p.large_mu : p.small_mu;
}

}  // namespace cornermatch
