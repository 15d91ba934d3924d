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

#include <string>

#include "cornermatch/synthbench.hpp"
#include "cornermatch/tensor.hpp"

namespace cornermatch {

/// Line chart of AP against the swept noise value of one report row, one
/// polyline per strategy. Returns an empty string if the row has no cells.
std::string ap_curve_svg(const BenchReport& report, const std::string& row);

/// Scatter of the regular kernel grid and the offset-displaced sampling
/// locations of a deformable convolution at output cell (i, j).
std::string sampling_scatter_svg(const Tensor& offsets, int kernel_size, int i, int j);

}  // namespace cornermatch
