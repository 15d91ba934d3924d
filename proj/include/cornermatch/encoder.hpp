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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cornermatch/geometry.hpp"
#include "cornermatch/tensor.hpp"

namespace cornermatch {

struct SceneObject {
  BBox box;
  int category = 0;
  std::optional<std::vector<float>> mask;  // 28x28 row-major, 0/1
};

struct Scene {
  int width = 0;
  int height = 0;
  std::vector<SceneObject> objects;
};

/// Invalid scene content. The message names the offending object.
class SceneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A corner whose centripetal shift would need the log of a non-positive
/// number.
class EncodingDegenerate : public std::runtime_error {
 public:
  EncodingDegenerate(int object_index, const std::string& what)
      : std::runtime_error(what), object_index_(object_index) {}
  int object_index() const { return object_index_; }

 private:
  int object_index_;
};

/// Checks image size, box bounds, categories and mask sizes.
void validate_scene(const Scene& scene);

/// Number of category channels needed to hold every object in the scene;
/// at least one.
int infer_num_categories(const Scene& scene);

struct RadiusPolicy {
  enum class Mode { fixed, iou };
  Mode mode = Mode::iou;
  int fixed_radius = 0;
  double min_overlap = 0.3;

  static RadiusPolicy fixed(int r) { return {Mode::fixed, r, 0.3}; }
};

struct EncoderConfig {
  int stride = 4;
  int num_categories = 0;  // 0: infer from the scene
  RadiusPolicy radius;
};

/// Largest radius (in heatmap cells) by which both corners can move while
/// the box they span keeps IoU >= min_overlap with the original.
double gaussian_radius(double width, double height, double min_overlap);

/// Max-combines an unnormalised Gaussian of the given radius and peak value
/// into channel c, centred on cell (i, j). sigma = (2r + 1) / 6.
void draw_gaussian(Tensor& heat, int c, int i, int j, int radius, float peak = 1.0f);

/// Heatmap cell index of image coordinate v. A corner lying exactly on the
/// far image edge maps to the last cell.
int corner_cell(double v, int stride, int cells);

/// Centripetal shift of one corner of b: per axis, the log of the
/// corner-to-centre distance divided by the stride. Throws
/// std::domain_error if a distance is not positive.
std::array<double, 2> centripetal_shift(const BBox& b, CornerKind kind, int stride);

/// Guiding shift of one corner of b, from its floored heatmap cell to the
/// exact centre in heatmap cells. Top-left: centre/s - floor(corner/s).
/// Bottom-right stores the mirrored value floor(corner/s) - centre/s, so
/// the centre is recovered as cell - shift.
std::array<double, 2> guiding_shift(const BBox& b, CornerKind kind, int stride);

struct CornerPair {
  Tensor tl;
  Tensor br;
};

CornerPair encode_heatmaps(const Scene& scene, const EncoderConfig& cfg);
// The following maps are (2, H/s, W/s) with channel 0 = x and channel 1 = y,
// written only at ground-truth corner cells; later objects overwrite earlier
// ones that share a cell.
CornerPair encode_local_offsets(const Scene& scene, int stride);
CornerPair encode_centripetal_shifts(const Scene& scene, int stride);
CornerPair encode_guiding_shifts(const Scene& scene, int stride);

struct CornerTargets {
  Tensor heat;
  Tensor offsets;
  Tensor shifts;   // centripetal, log space
  Tensor guiding;  // guiding shift, heatmap cells
  Tensor valid;    // (1, H/s, W/s), 1 at ground-truth corner cells
};

struct TargetMaps {
  int stride = 4;
  int num_categories = 0;
  CornerTargets tl;
  CornerTargets br;
  Tensor masks;                     // (M, 28, 28) for objects carrying masks
  std::vector<int> mask_objects;    // scene index of each mask
};

TargetMaps encode_targets(const Scene& scene, const EncoderConfig& cfg);

struct EncodabilityFlag {
  int object = 0;
  CornerKind corner = CornerKind::top_left;
  int axis = 0;        // 0 = x, 1 = y
  double offset = 0;   // cells from the rounded corner towards the centre
};

/// Reports every corner whose offset from its rounded heatmap cell to the
/// exact box centre is <= 0, i.e. cannot be encoded in log space.
std::vector<EncodabilityFlag> validate_center_regression_encodable(
    const Scene& scene, int stride);

}  // namespace cornermatch
