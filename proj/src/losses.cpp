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
#include "cornermatch/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cornermatch {

namespace {

double sl1(double d) { return std::abs(d) < 1.0 ? 0.5 * d * d : std::abs(d) - 0.5; }
double sl1_grad(double d) {
  if (std::abs(d) < 1.0) return d;
  return d > 0.0 ? 1.0 : -1.0;
}

void require_equal_length(std::span<const double> a, std::span<const double> b,
                          const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

Loss corner_shift_loss(std::span<const double> pred, std::span<const double> gt,
                       const char* what) {
  require_equal_length(pred, gt, what);
  if (pred.empty() || pred.size() % 4 != 0) {
    throw std::invalid_argument(std::string(what) +
                                ": need 4N values for N >= 1 ground-truth objects");
  }
  const double n = static_cast<double>(pred.size() / 4);
  Loss out;
  out.grad.resize(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - gt[k];
    out.value += sl1(d);
    out.grad[k] = sl1_grad(d) / n;
  }
  out.value /= n;
  return out;
}

}  // namespace

Loss smooth_l1(std::span<const double> pred, std::span<const double> gt) {
  require_equal_length(pred, gt, "smooth_l1");
  Loss out;
  out.grad.resize(pred.size());
  if (pred.empty()) return out;
  const double n = static_cast<double>(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - gt[k];
    out.value += sl1(d);
    out.grad[k] = sl1_grad(d) / n;
  }
  out.value /= n;
  return out;
}

Loss centripetal_loss(std::span<const double> pred, std::span<const double> gt) {
  return corner_shift_loss(pred, gt, "centripetal_loss");
}

Loss guiding_shift_loss(std::span<const double> pred, std::span<const double> gt) {
  return corner_shift_loss(pred, gt, "guiding_shift_loss");
}

Loss mask_loss(std::span<const double> pred, std::span<const double> gt,
               int num_masks) {
  require_equal_length(pred, gt, "mask_loss");
  if (num_masks <= 0) throw std::invalid_argument("mask_loss: need at least one proposal");
  constexpr std::size_t kPixels = kMaskSide * kMaskSide;
  if (pred.size() != kPixels * static_cast<std::size_t>(num_masks)) {
    throw std::invalid_argument("mask_loss: expected num_masks x 28 x 28 values");
  }
  const double scale = 1.0 / (static_cast<double>(num_masks) * kPixels);
  Loss out;
  out.grad.resize(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double raw = pred[k];
    const double p = std::clamp(raw, kMaskEpsilon, 1.0 - kMaskEpsilon);
    const double g = gt[k];
    out.value -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
    const bool clamped = raw < kMaskEpsilon || raw > 1.0 - kMaskEpsilon;
    out.grad[k] = clamped ? 0.0 : scale * (-g / p + (1.0 - g) / (1.0 - p));
  }
  out.value *= scale;
  return out;
}

double total_loss(const LossTerms& t, double alpha) {
  return t.det + t.off + alpha * t.guiding + t.centripetal + t.mask;
}

LossTerms total_loss_gradient(double alpha) { return {1.0, 1.0, alpha, 1.0, 1.0}; }

GradCheckResult grad_check(const LossFn& f, std::span<const double> x, double h,
                           const NonSmoothFn& nonsmooth) {
  constexpr double kFloor = 1e-7;
  GradCheckResult result;
  const Loss base = f(x);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (nonsmooth && nonsmooth(k, x, h)) {
      result.excluded.push_back(k);
      continue;
    }
    probe[k] = x[k] + h;
    const double up = f(probe).value;
    probe[k] = x[k] - h;
    const double down = f(probe).value;
    probe[k] = x[k];
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = base.grad.at(k);
    const double denom = std::max({std::abs(numeric), std::abs(analytic), kFloor});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(numeric - analytic) / denom);
  }
  return result;
}

NonSmoothFn smooth_l1_kinks(std::vector<double> gt) {
  return [gt = std::move(gt)](std::size_t k, std::span<const double> x, double h) {
    return std::abs(std::abs(x[k] - gt.at(k)) - 1.0) <= h;
  };
}

}  // namespace cornermatch
