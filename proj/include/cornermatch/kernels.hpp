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

#include <vector>

#include "cornermatch/geometry.hpp"
#include "cornermatch/tensor.hpp"

namespace cornermatch {

// Directional running-max scans, per channel.
//   top_pool:    out[c,i,j] = max_{i' >= i} x[c,i',j]   (scans bottom to top)
//   left_pool:   out[c,i,j] = max_{j' >= j} x[c,i,j']   (scans right to left)
//   bottom_pool: out[c,i,j] = max_{i' <= i} x[c,i',j]   (scans top to bottom)
//   right_pool:  out[c,i,j] = max_{j' <= j} x[c,i,j']   (scans left to right)
Tensor top_pool(const Tensor& x);
Tensor left_pool(const Tensor& x);
Tensor bottom_pool(const Tensor& x);
Tensor right_pool(const Tensor& x);

/// Top-left corner pooling: top_pool(f_t) + left_pool(f_l).
Tensor corner_pool_tl(const Tensor& f_t, const Tensor& f_l);
/// Bottom-right corner pooling: bottom_pool(f_b) + right_pool(f_r).
Tensor corner_pool_br(const Tensor& f_b, const Tensor& f_r);

/// Keypoint NMS: keeps cells equal to their in-bounds 3x3 neighbourhood
/// maximum (ties survive) and zeroes everything else.
Tensor nms_maxpool3(const Tensor& h);

enum class SoftmaxAxis { channel, spatial };

/// Max-subtracted softmax. `channel` normalises over C at every (i, j);
/// `spatial` normalises over all H*W cells of each channel.
Tensor softmax_scores(const Tensor& h, SoftmaxAxis axis = SoftmaxAxis::channel);

/// Elementwise logistic function.
Tensor sigmoid_scores(const Tensor& h);

/// Bilinear read of channel c at p = (x: column, y: row) in feature cells.
/// Neighbours outside the map contribute zero.
double bilinear_sample(const Tensor& f, int c, Point p);

/// Convolution weights laid out (out, in, k, k), row-major.
struct KernelWeights {
  int out_channels = 0;
  int in_channels = 0;
  int size = 0;
  std::vector<float> data;

  KernelWeights() = default;
  KernelWeights(int out, int in, int k, float fill = 0.0f);

  float& at(int o, int ci, int a, int b) {
    return data[((static_cast<std::size_t>(o) * in_channels + ci) * size + a) * size + b];
  }
  float at(int o, int ci, int a, int b) const {
    return data[((static_cast<std::size_t>(o) * in_channels + ci) * size + a) * size + b];
  }
};

/// Deformable convolution forward pass, stride 1, zero padding k/2.
///
/// `offsets` has shape (2*k*k, H, W). Taps are enumerated row-major
/// (t = a*k + b, a over kernel rows), and channel 2t holds the tap's dy and
/// channel 2t+1 its dx, both in feature cells. The tap (a, b) at output
/// (i, j) reads f at row i + a - k/2 + dy and column j + b - k/2 + dx.
Tensor deform_conv_forward(const Tensor& f, const KernelWeights& w,
                           const Tensor& offsets);

/// Absolute sampling positions (x: column, y: row) of every tap at output cell
/// (i, j), in tap order. Used for offset-field visualisation.
std::vector<Point> deform_sampling_points(const Tensor& offsets, int kernel_size,
                                          int i, int j);

/// RoIAlign with continuous bin boundaries and 2x2 regular samples per bin.
///
/// The roi is in image pixels and maps to feature coordinates as x / stride -
/// 0.5, so that feature cell centres sit at integer coordinates. Output is
/// (C, out_size, out_size). Throws std::invalid_argument for stride <= 0 or
/// out_size <= 0.
Tensor roi_align(const Tensor& f, const BBox& roi, double stride,
                 int out_size = 14);

}  // namespace cornermatch
