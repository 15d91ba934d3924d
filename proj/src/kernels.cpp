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
#include "cornermatch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cornermatch {

namespace {

// Running max along rows (vertical=true) or columns, in the given direction.
Tensor directional_max(const Tensor& x, bool vertical, bool forward) {
  Tensor out = x;
  const int h = x.height();
  const int w = x.width();
  for (int c = 0; c < x.channels(); ++c) {
    if (vertical) {
      for (int j = 0; j < w; ++j) {
        if (forward) {
          for (int i = 1; i < h; ++i)
            out.at(c, i, j) = std::max(out.at(c, i, j), out.at(c, i - 1, j));
        } else {
          for (int i = h - 2; i >= 0; --i)
            out.at(c, i, j) = std::max(out.at(c, i, j), out.at(c, i + 1, j));
        }
      }
    } else {
      for (int i = 0; i < h; ++i) {
        if (forward) {
          for (int j = 1; j < w; ++j)
            out.at(c, i, j) = std::max(out.at(c, i, j), out.at(c, i, j - 1));
        } else {
          for (int j = w - 2; j >= 0; --j)
            out.at(c, i, j) = std::max(out.at(c, i, j), out.at(c, i, j + 1));
        }
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] += bd[k];
  return out;
}

}  // namespace

Tensor top_pool(const Tensor& x) { return directional_max(x, true, false); }
Tensor left_pool(const Tensor& x) { return directional_max(x, false, false); }
Tensor bottom_pool(const Tensor& x) { return directional_max(x, true, true); }
Tensor right_pool(const Tensor& x) { return directional_max(x, false, true); }

Tensor corner_pool_tl(const Tensor& f_t, const Tensor& f_l) {
  require_same_shape(f_t, f_l, "corner_pool_tl");
  return add(top_pool(f_t), left_pool(f_l));
}

Tensor corner_pool_br(const Tensor& f_b, const Tensor& f_r) {
  require_same_shape(f_b, f_r, "corner_pool_br");
  return add(bottom_pool(f_b), right_pool(f_r));
}

Tensor nms_maxpool3(const Tensor& h) {
  Tensor out(h.channels(), h.height(), h.width());
  const int H = h.height(), W = h.width();
  if (h.empty()) return out;
  // Separable 3x3 maximum: along rows into `rows`, then down columns.
  std::vector<float> rows(static_cast<std::size_t>(H) * W);
  for (int c = 0; c < h.channels(); ++c) {
    const float* src = h.plane(c).data();
    float* dst = out.plane(c).data();
    for (int i = 0; i < H; ++i) {
      const float* r = src + static_cast<std::size_t>(i) * W;
      float* m = rows.data() + static_cast<std::size_t>(i) * W;
      for (int j = 0; j < W; ++j) {
        float v = r[j];
        if (j > 0) v = std::max(v, r[j - 1]);
        if (j + 1 < W) v = std::max(v, r[j + 1]);
        m[j] = v;
      }
    }
    for (int i = 0; i < H; ++i) {
      const float* up = rows.data() + static_cast<std::size_t>(i > 0 ? i - 1 : i) * W;
      const float* mid = rows.data() + static_cast<std::size_t>(i) * W;
      const float* down = rows.data() + static_cast<std::size_t>(i + 1 < H ? i + 1 : i) * W;
      const float* r = src + static_cast<std::size_t>(i) * W;
      float* o = dst + static_cast<std::size_t>(i) * W;
      for (int j = 0; j < W; ++j) {
        const float m = std::max({up[j], mid[j], down[j]});
        o[j] = r[j] >= m ? r[j] : 0.0f;
      }
    }
  }
  return out;
}

Tensor softmax_scores(const Tensor& h, SoftmaxAxis axis) {
  Tensor out(h.channels(), h.height(), h.width());
  if (h.empty()) return out;
  if (axis == SoftmaxAxis::channel) {
    const int cells = h.height() * h.width();
    const auto src = h.data();
    auto dst = out.data();
    for (int p = 0; p < cells; ++p) {
      double m = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < h.channels(); ++c) m = std::max<double>(m, src[c * cells + p]);
      double z = 0.0;
      for (int c = 0; c < h.channels(); ++c) z += std::exp(src[c * cells + p] - m);
      for (int c = 0; c < h.channels(); ++c)
        dst[c * cells + p] = static_cast<float>(std::exp(src[c * cells + p] - m) / z);
    }
  } else {
    for (int c = 0; c < h.channels(); ++c) {
      const auto src = h.plane(c);
      auto dst = out.plane(c);
      const double m = *std::max_element(src.begin(), src.end());
      double z = 0.0;
      for (float v : src) z += std::exp(v - m);
      for (std::size_t k = 0; k < src.size(); ++k)
        dst[k] = static_cast<float>(std::exp(src[k] - m) / z);
    }
  }
  return out;
}

Tensor sigmoid_scores(const Tensor& h) {
  Tensor out = h;
  for (float& v : out.data()) v = 1.0f / (1.0f + std::exp(-v));
  return out;
}

double bilinear_sample(const Tensor& f, int c, Point p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return 0.0;
  const double fx = std::floor(p.x);
  const double fy = std::floor(p.y);
  // Anything this far out has no in-bounds neighbour.
  if (fx < -1.0 || fy < -1.0 || fx > f.width() || fy > f.height()) return 0.0;
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double lx = p.x - fx;
  const double ly = p.y - fy;
  auto read = [&](int i, int j) -> double {
    return f.in_bounds(i, j) ? f.at(c, i, j) : 0.0;
  };
  return (1 - ly) * (1 - lx) * read(y0, x0) + (1 - ly) * lx * read(y0, x0 + 1) +
         ly * (1 - lx) * read(y0 + 1, x0) + ly * lx * read(y0 + 1, x0 + 1);
}

KernelWeights::KernelWeights(int out, int in, int k, float fill)
    : out_channels(out), in_channels(in), size(k),
      data(static_cast<std::size_t>(out) * in * k * k, fill) {}

Tensor deform_conv_forward(const Tensor& f, const KernelWeights& w,
                           const Tensor& offsets) {
  const int k = w.size;
  if (k <= 0 || k % 2 == 0) throw ShapeError("deform_conv: kernel size must be odd");
  if (w.in_channels != f.channels()) {
    throw ShapeError("deform_conv: weight input channels do not match feature map");
  }
  if (w.data.size() != static_cast<std::size_t>(w.out_channels) * w.in_channels * k * k) {
    throw ShapeError("deform_conv: weight buffer length does not match its shape");
  }
  if (offsets.channels() != 2 * k * k || offsets.height() != f.height() ||
      offsets.width() != f.width()) {
    throw ShapeError("deform_conv: offset field must be (2*k*k, H, W)");
  }
  const int half = k / 2;
  Tensor out(w.out_channels, f.height(), f.width());
  std::vector<double> samples(static_cast<std::size_t>(f.channels()) * k * k);
  for (int i = 0; i < f.height(); ++i) {
    for (int j = 0; j < f.width(); ++j) {
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          const int t = a * k + b;
          const Point p{j + b - half + offsets.at(2 * t + 1, i, j),
                        i + a - half + offsets.at(2 * t, i, j)};
          for (int ci = 0; ci < f.channels(); ++ci)
            samples[static_cast<std::size_t>(ci) * k * k + t] = bilinear_sample(f, ci, p);
        }
      }
      for (int o = 0; o < w.out_channels; ++o) {
        double acc = 0.0;
        for (int ci = 0; ci < f.channels(); ++ci)
          for (int t = 0; t < k * k; ++t)
            acc += w.at(o, ci, t / k, t % k) * samples[static_cast<std::size_t>(ci) * k * k + t];
        out.at(o, i, j) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

std::vector<Point> deform_sampling_points(const Tensor& offsets, int kernel_size,
                                          int i, int j) {
  const int k = kernel_size;
  if (offsets.channels() != 2 * k * k) {
    throw ShapeError("offset field channel count does not match kernel size");
  }
  if (!offsets.in_bounds(i, j)) throw std::out_of_range("sampling cell outside offset field");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const int t = a * k + b;
      pts.push_back({j + b - k / 2 + offsets.at(2 * t + 1, i, j),
                     i + a - k / 2 + offsets.at(2 * t, i, j)});
    }
  return pts;
}

Tensor roi_align(const Tensor& f, const BBox& roi, double stride, int out_size) {
  if (!(stride > 0.0)) throw std::invalid_argument("roi_align: stride must be positive");
  if (out_size <= 0) throw std::invalid_argument("roi_align: output size must be positive");
  constexpr int kSamples = 2;
  const double x0 = roi.tlx() / stride - 0.5;
  const double y0 = roi.tly() / stride - 0.5;
  const double bin_w = roi.width() / stride / out_size;
  const double bin_h = roi.height() / stride / out_size;
  Tensor out(f.channels(), out_size, out_size);
  for (int c = 0; c < f.channels(); ++c) {
    for (int ph = 0; ph < out_size; ++ph) {
      for (int pw = 0; pw < out_size; ++pw) {
        double acc = 0.0;
        for (int iy = 0; iy < kSamples; ++iy) {
          const double y = y0 + (ph + (iy + 0.5) / kSamples) * bin_h;
          for (int ix = 0; ix < kSamples; ++ix) {
            const double x = x0 + (pw + (ix + 0.5) / kSamples) * bin_w;
            acc += bilinear_sample(f, c, {x, y});
          }
        }
        out.at(c, ph, pw) = static_cast<float>(acc / (kSamples * kSamples));
      }
    }
  }
  return out;
}

}  // namespace cornermatch
