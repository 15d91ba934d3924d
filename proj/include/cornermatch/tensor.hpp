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
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace cornermatch {

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense row-major (channels, height, width) array of float32.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int c, int i, int j) { return data_[index(c, i, j)]; }
  float at(int c, int i, int j) const { return data_[index(c, i, j)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  std::span<float> plane(int c) {
    return std::span<float>(data_).subspan(
        static_cast<std::size_t>(c) * shape_.height * shape_.width,
        static_cast<std::size_t>(shape_.height) * shape_.width);
  }
  std::span<const float> plane(int c) const {
    return std::span<const float>(data_).subspan(
        static_cast<std::size_t>(c) * shape_.height * shape_.width,
        static_cast<std::size_t>(shape_.height) * shape_.width);
  }

  bool in_bounds(int i, int j) const {
    return i >= 0 && i < shape_.height && j >= 0 && j < shape_.width;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t index(int c, int i, int j) const {
    return (static_cast<std::size_t>(c) * shape_.height + i) * shape_.width + j;
  }

  Shape shape_;
  std::vector<float> data_;
};

/// Thrown when two tensors that must agree in shape do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

// CTSR tensor files: "CTSR1\n", a little-endian uint32 byte count, that many
// bytes of UTF-8 JSON {"dtype":"f32","shape":[C,H,W]}, then C*H*W
// little-endian float32 values in row-major order.
std::vector<char> encode_ctsr(const Tensor& t);
Tensor decode_ctsr(std::span<const char> bytes);
void write_ctsr(const std::filesystem::path& path, const Tensor& t);
Tensor read_ctsr(const std::filesystem::path& path);

}  // namespace cornermatch
