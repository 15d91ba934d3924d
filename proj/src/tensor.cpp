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
#include "cornermatch/tensor.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"

namespace cornermatch {

namespace {

constexpr char kMagic[] = "CTSR1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

void check_shape(const Shape& s) {
  if (s.channels < 0 || s.height < 0 || s.width < 0) {
    throw ShapeError("negative tensor dimension");
  }
}

void put_u32_le(std::vector<char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t get_u32_le(const char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return v;
}

}  // namespace

Tensor::Tensor(int channels, int height, int width, float fill)
    : shape_{channels, height, width} {
  check_shape(shape_);
  data_.assign(shape_.size(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape product " +
                     std::to_string(shape_.size()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    auto fmt = [](const Shape& s) {
      return "[" + std::to_string(s.channels) + "," + std::to_string(s.height) +
             "," + std::to_string(s.width) + "]";
    };
    throw ShapeError(std::string(what) + ": shape mismatch " + fmt(a.shape()) +
                     " vs " + fmt(b.shape()));
  }
}

std::vector<char> encode_ctsr(const Tensor& t) {
  const nlohmann::json header = {
      {"dtype", "f32"},
      {"shape", {t.channels(), t.height(), t.width()}}};
  const std::string h = header.dump();
  std::vector<char> out(kMagic, kMagic + kMagicLen);
  put_u32_le(out, static_cast<std::uint32_t>(h.size()));
  out.insert(out.end(), h.begin(), h.end());
  out.reserve(out.size() + 4 * t.size());
  for (float v : t.data()) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Tensor decode_ctsr(std::span<const char> bytes) {
  if (bytes.size() < kMagicLen + 4 ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw std::runtime_error("not a CTSR tensor (bad magic)");
  }
  const std::uint32_t hlen = get_u32_le(bytes.data() + kMagicLen);
  const std::size_t body = kMagicLen + 4 + hlen;
  if (bytes.size() < body) throw std::runtime_error("truncated CTSR header");
  const auto header = nlohmann::json::parse(
      std::string(bytes.data() + kMagicLen + 4, hlen), nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw std::runtime_error("CTSR header is not a JSON object");
  }
  if (header.value("dtype", "") != "f32") {
    throw std::runtime_error("unsupported CTSR dtype");
  }
  const auto& js = header.at("shape");
  if (!js.is_array() || js.size() != 3) {
    throw std::runtime_error("CTSR shape must have three dimensions");
  }
  const Shape shape{js[0].get<int>(), js[1].get<int>(), js[2].get<int>()};
  check_shape(shape);
  if (bytes.size() != body + 4 * shape.size()) {
    throw std::runtime_error("CTSR payload length does not match shape");
  }
  std::vector<float> data(shape.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    data[k] = std::bit_cast<float>(get_u32_le(bytes.data() + body + 4 * k));
  }
  return Tensor(shape, std::move(data));
}

void write_ctsr(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_ctsr(t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Tensor read_ctsr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor file " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return decode_ctsr(bytes);
}

}  // namespace cornermatch
