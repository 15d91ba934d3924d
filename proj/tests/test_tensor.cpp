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
#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cornermatch/tensor.hpp"

using namespace cornermatch;

TEST_CASE("ctsr layout") {
  Tensor t(1, 1, 2);
  t.at(0, 0, 0) = 1.0f;
  t.at(0, 0, 1) = -2.5f;
  const auto bytes = encode_ctsr(t);
  REQUIRE(bytes.size() > 10);
  CHECK(std::string(bytes.data(), 6) == "CTSR1\n");
  std::uint32_t n = 0;
  for (int k = 3; k >= 0; --k) n = (n << 8) | static_cast<unsigned char>(bytes[6 + k]);
  const std::string header(bytes.data() + 10, n);
  CHECK(header.find("\"f32\"") != std::string::npos);
  CHECK(header.find("[1,1,2]") != std::string::npos);
  REQUIRE(bytes.size() == 10 + n + 8);
  float v;
  std::memcpy(&v, bytes.data() + 10 + n + 4, 4);  // host is little-endian here
  CHECK(v == -2.5f);
}

TEST_CASE("ctsr round trip is exact") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const Tensor t = oracle::random_tensor(rng, oracle::rand_int(rng, 1, 4),
                                           oracle::rand_int(rng, 1, 9), oracle::rand_int(rng, 1, 9),
                                           -1e6, 1e6);
    CHECK(decode_ctsr(encode_ctsr(t)) == t);
  }
  const auto path = std::filesystem::temp_directory_path() / "cm_tensor_rt.ctsr";
  const Tensor t = oracle::random_tensor(rng, 2, 3, 4);
  write_ctsr(path, t);
  CHECK(read_ctsr(path) == t);
  std::filesystem::remove(path);
}

TEST_CASE("ctsr rejects malformed input") {
  const auto good = encode_ctsr(Tensor(1, 2, 2));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS(decode_ctsr(bad_magic));
  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS(decode_ctsr(truncated));
  CHECK_THROWS(decode_ctsr(std::vector<char>{'C', 'T'}));
  CHECK_THROWS(read_ctsr("/nonexistent/file.ctsr"));
}

TEST_CASE("shape checks") {
  CHECK_THROWS_AS(Tensor(Shape{1, 2, 2}, std::vector<float>(3)), ShapeError);
  CHECK_THROWS_AS(require_same_shape(Tensor(1, 2, 2), Tensor(1, 2, 3), "x"), ShapeError);
  CHECK_NOTHROW(require_same_shape(Tensor(1, 2, 2), Tensor(1, 2, 2), "x"));
}
