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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cornermatch {

/// A scalar loss and its gradient with respect to the prediction vector.
struct Loss {
  double value = 0.0;
  std::vector<double> grad;
};

/// Elementwise smooth L1 (beta = 1), averaged over elements.
/// Throws std::invalid_argument on length mismatch.
Loss smooth_l1(std::span<const double> pred, std::span<const double> gt);

// Per-corner shift losses. Vectors are laid out as N top-left (x, y) pairs
// followed by N bottom-right (x, y) pairs, so their length is 4N. Each pair's
// two smooth-L1 terms are summed; the total is divided by N.
Loss centripetal_loss(std::span<const double> pred, std::span<const double> gt);
Loss guiding_shift_loss(std::span<const double> pred, std::span<const double> gt);

inline constexpr int kMaskSide = 28;
inline constexpr double kMaskEpsilon = 1e-7;

/// Mean per-pixel binary cross-entropy of each 28x28 mask, averaged over the
/// `num_masks` proposals. Predictions are clamped to [eps, 1 - eps].
Loss mask_loss(std::span<const double> pred, std::span<const double> gt,
               int num_masks);

struct LossTerms {
  double det = 0.0;
  double off = 0.0;
  double guiding = 0.0;
  double centripetal = 0.0;
  double mask = 0.0;
};

inline constexpr double kGuidingShiftWeight = 0.05;

double total_loss(const LossTerms& t, double alpha = kGuidingShiftWeight);
/// Partial derivatives of total_loss with respect to each term.
LossTerms total_loss_gradient(double alpha = kGuidingShiftWeight);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<std::size_t> excluded;  // coordinates skipped as non-smooth
};

using LossFn = std::function<Loss(std::span<const double>)>;
using NonSmoothFn = std::function<bool(std::size_t, std::span<const double>, double)>;

/// Compares the analytic gradient of `f` at `x` to central differences with
/// step h. Coordinates for which `nonsmooth(index, x, h)` is true are skipped
/// and reported.
GradCheckResult grad_check(const LossFn& f, std::span<const double> x,
                           double h = 1e-4, const NonSmoothFn& nonsmooth = {});

/// Non-smooth predicate for smooth-L1 based losses against `gt`: true when
/// |x - gt| lies within h of the kink at 1.
NonSmoothFn smooth_l1_kinks(std::vector<double> gt);

}  // namespace cornermatch
