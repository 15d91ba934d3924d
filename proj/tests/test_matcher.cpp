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
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cornermatch/matcher.hpp"

using namespace cornermatch;

namespace {

CornerCandidate corner(CornerKind kind, double x, double y, double score, int category = 0) {
  CornerCandidate c;
  c.kind = kind;
  c.pos = {x, y};
  c.score = score;
  c.category = category;
  return c;
}

// Candidate whose centripetal shift points exactly at `center`.
CornerCandidate aimed(CornerKind kind, double x, double y, Point center, double score,
                      int category = 0, int stride = 4) {
  CornerCandidate c = corner(kind, x, y, score, category);
  const double dx = std::abs(center.x - x), dy = std::abs(center.y - y);
  c.cs = {std::log(dx / stride), std::log(dy / stride)};
  return c;
}

}  // namespace

TEST_CASE("strategy names round trip") {
  for (auto s : {MatchStrategy::centripetal, MatchStrategy::center_regression,
                 MatchStrategy::associative_1d, MatchStrategy::associative_2d,
                 MatchStrategy::center_validation})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("nope"), std::invalid_argument);
}

TEST_CASE("pairing requires same category and strict ordering") {
  const std::vector<CornerCandidate> tls = {corner(CornerKind::top_left, 0, 0, 0.5),
                                            corner(CornerKind::top_left, 10, 0, 0.5),
                                            corner(CornerKind::top_left, 0, 0, 0.5, 1)};
  const std::vector<CornerCandidate> brs = {corner(CornerKind::bottom_right, 10, 10, 0.5)};
  const auto pairs = pair_candidates(tls, brs);
  REQUIRE(pairs.size() == 1);  // tlx == brx is rejected
  CHECK(pairs[0].tl == 0);
  CHECK(pairs[0].score == doctest::Approx(0.5));
}

TEST_CASE("pair score is the geometric mean of the corner scores") {
  const std::vector<CornerCandidate> tls = {corner(CornerKind::top_left, 0, 0, 0.81)};
  const std::vector<CornerCandidate> brs = {corner(CornerKind::bottom_right, 9, 9, 0.25)};
  CHECK(pair_candidates(tls, brs)[0].score == doctest::Approx(0.45));
}

TEST_CASE("weight extremes") {
  const BBox box(0, 0, 100, 80);
  const MuPolicy p;
  const Point c = box_center(box);
  CHECK(center_agreement_weight(box, c, c, p) == 1.0);
  CHECK(center_agreement_weight(box, {45, 38}, {45, 38}, p) == 1.0);
  // Region for area 8000 > 3500 is mu = 1/2.1 of the box: x in [26.19, 73.81].
  CHECK(center_agreement_weight(box, {20, 40}, c, p) == 0.0);
  CHECK(center_agreement_weight(box, c, {50, 79}, p) == 0.0);
  CHECK(center_agreement_weight(box, {-1e9, 40}, {1e9, 40}, p) == 0.0);
}

TEST_CASE("weight formula matches the region-normalised exponent") {
  std::mt19937_64 rng(1);
  const MuPolicy p;
  for (int n = 0; n < 200; ++n) {
    const BBox b = oracle::random_box(rng, 300, 300, 2);
    const double mu = b.area() > 3500 ? 1 / 2.1 : 1 / 2.4;
    const double ctx = (b.tlx() + b.brx()) / 2, cty = (b.tly() + b.bry()) / 2;
    const double ctlx = ctx - (b.brx() - b.tlx()) / 2 * mu, cbrx = ctx + (b.brx() - b.tlx()) / 2 * mu;
    const double ctly = cty - (b.bry() - b.tly()) / 2 * mu, cbry = cty + (b.bry() - b.tly()) / 2 * mu;
    const BBox r = central_region(b, select_mu(b, p));
    CHECK(std::abs(r.tlx() - ctlx) < 1e-9);
    CHECK(std::abs(r.bry() - cbry) < 1e-9);
    const Point a{oracle::rand_uniform(rng, ctlx, cbrx), oracle::rand_uniform(rng, ctly, cbry)};
    const Point q{oracle::rand_uniform(rng, ctlx, cbrx), oracle::rand_uniform(rng, ctly, cbry)};
    const double expected =
        std::exp(-std::abs(q.x - a.x) * std::abs(q.y - a.y) / ((cbrx - ctlx) * (cbry - ctly)));
    CHECK(std::abs(center_agreement_weight(b, a, q, p) - expected) < 1e-12);
    const double ux = (q.x - a.x) / (cbrx - ctlx), uy = (q.y - a.y) / (cbry - ctly);
    CHECK(std::abs(center_agreement_weight(b, a, q, p, WeightForm::euclidean) -
                   std::exp(-(ux * ux + uy * uy))) < 1e-12);
  }
}

TEST_CASE("centripetal matching keeps the consistent pair and rejects the cross pair") {
  // Two side-by-side same-category boxes.
  const BBox a(10, 10, 50, 50), b(60, 10, 100, 50);
  const std::vector<CornerCandidate> tls = {
      aimed(CornerKind::top_left, 10, 10, box_center(a), 0.9),
      aimed(CornerKind::top_left, 60, 10, box_center(b), 0.9)};
  const std::vector<CornerCandidate> brs = {
      aimed(CornerKind::bottom_right, 50, 50, box_center(a), 0.9),
      aimed(CornerKind::bottom_right, 100, 50, box_center(b), 0.9)};
  MatchConfig cfg;
  const auto out = match_centripetal(tls, brs, cfg);
  REQUIRE(out.size() == 2);
  for (const auto& o : out) {
    CHECK(o.weight == doctest::Approx(1.0));
    CHECK(std::max(iou(o.det.box, a), iou(o.det.box, b)) == doctest::Approx(1.0));
  }
}

TEST_CASE("associative matching thresholds the L1 embedding distance") {
  auto tl = corner(CornerKind::top_left, 0, 0, 0.9);
  auto br = corner(CornerKind::bottom_right, 10, 10, 0.9);
  tl.embedding = {1.0, 2.0};
  br.embedding = {1.2, 2.25};
  MatchConfig cfg;
  cfg.strategy = MatchStrategy::associative_2d;
  CHECK(match_associative(std::vector{tl}, std::vector{br}, cfg).size() == 1);
  br.embedding = {1.3, 2.25};
  CHECK(match_associative(std::vector{tl}, std::vector{br}, cfg).empty());
  cfg.strategy = MatchStrategy::associative_1d;
  CHECK_THROWS_AS(match_associative(std::vector{tl}, std::vector{br}, cfg), MissingInput);
  tl.embedding.clear();
  cfg.strategy = MatchStrategy::associative_2d;
  try {
    match(std::vector{tl}, std::vector{br}, {}, cfg);
    FAIL("expected MissingInput");
  } catch (const MissingInput& e) {
    CHECK(std::string(e.what()) == "embeddings required");
  }
}

TEST_CASE("centre regression requires linear shifts") {
  const auto tl = corner(CornerKind::top_left, 0, 0, 0.9);
  const auto br = corner(CornerKind::bottom_right, 10, 10, 0.9);
  MatchConfig cfg;
  cfg.strategy = MatchStrategy::center_regression;
  CHECK_THROWS_AS(match(std::vector{tl}, std::vector{br}, {}, cfg), MissingInput);
}

TEST_CASE("centre validation needs a same-category centre in the central region") {
  const auto tl = corner(CornerKind::top_left, 0, 0, 0.9);
  const auto br = corner(CornerKind::bottom_right, 40, 40, 0.9);
  MatchConfig cfg;
  cfg.strategy = MatchStrategy::center_validation;
  const std::vector<CenterCandidate> inside = {{{20, 21}, 0, 0.9}};
  const std::vector<CenterCandidate> wrong_cat = {{{20, 21}, 1, 0.9}};
  const std::vector<CenterCandidate> outside = {{{5, 5}, 0, 0.9}};
  CHECK(match(std::vector{tl}, std::vector{br}, inside, cfg).size() == 1);
  CHECK(match(std::vector{tl}, std::vector{br}, wrong_cat, cfg).empty());
  CHECK(match(std::vector{tl}, std::vector{br}, outside, cfg).empty());
}

TEST_CASE("soft-nms closed form") {
  const std::vector<Detection> d = {{BBox(0, 0, 10, 10), 0, 1.0}, {BBox(0, 0, 10, 10), 0, 0.8}};
  const auto out = soft_nms(d, 0.5);
  REQUIRE(out.size() == 2);
  CHECK(out[0].score == 1.0);
  CHECK(std::abs(out[1].score - 0.8 * std::exp(-2.0)) < 1e-12);
  const std::vector<Detection> other = {{BBox(0, 0, 10, 10), 0, 1.0}, {BBox(0, 0, 10, 10), 1, 0.8}};
  CHECK(soft_nms(other, 0.5)[1].score == 0.8);  // class-wise
}

TEST_CASE("soft-nms matches brute force") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 50; ++n) {
    std::vector<Detection> d;
    const int count = oracle::rand_int(rng, 0, 12);
    for (int k = 0; k < count; ++k)
      d.push_back({oracle::random_box(rng, 60, 60, 5), oracle::rand_int(rng, 0, 1),
                   oracle::rand_uniform(rng, 0, 1)});
    const auto got = soft_nms(d, 0.5);
    const auto want = oracle::soft_nms(d, 0.5);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].box == want[k].box);
      CHECK(std::abs(got[k].score - want[k].score) < 1e-12);
    }
  }
}

TEST_CASE("final keep and zero scores") {
  std::vector<CornerCandidate> tls, brs;
  for (int k = 0; k < 5; ++k) {
    auto tl = corner(CornerKind::top_left, k, k, 0.5);
    tl.embedding = {0.0};
    tls.push_back(tl);
    auto br = corner(CornerKind::bottom_right, 50 + k, 50 + k, 0.5);
    br.embedding = {0.0};
    brs.push_back(br);
  }
  brs.push_back(corner(CornerKind::bottom_right, 80, 80, 0.0));
  brs.back().embedding = {0.0};
  MatchConfig cfg;
  cfg.strategy = MatchStrategy::associative_1d;
  cfg.final_keep = 7;
  const auto out = match(tls, brs, {}, cfg);
  CHECK(out.size() == 7);
  for (const auto& o : out) CHECK(o.det.score > 0.0);
  for (std::size_t k = 1; k < out.size(); ++k) CHECK(out[k - 1].det.score >= out[k].det.score);
  cfg.final_keep = 0;
  CHECK_THROWS_AS(match(tls, brs, {}, cfg), std::invalid_argument);
}
