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
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "cornermatch/json_io.hpp"
#include "cornermatch/synthbench.hpp"

using namespace cornermatch;

namespace {

const std::vector<MatchStrategy> kAll = {
    MatchStrategy::centripetal, MatchStrategy::center_regression, MatchStrategy::associative_1d,
    MatchStrategy::associative_2d, MatchStrategy::center_validation};

DecodeConfig probability_decode() { return DecodeConfig{4, 100, ScoreActivation::none}; }

MatchConfig with_strategy(MatchStrategy s) {
  MatchConfig m;
  m.strategy = s;
  return m;
}

SceneSpec pair_cluster_spec(std::uint64_t seed) {
  SceneSpec s;
  s.width = s.height = 256;
  s.num_categories = 1;
  s.min_objects = s.max_objects = 0;
  s.min_clusters = s.max_clusters = 1;
  s.min_cluster_size = s.max_cluster_size = 2;
  s.cluster_gap = -2.0;
  s.size_jitter = 0.0;
  s.sizes = {0.0, 0.0, 1.0};
  s.min_side = 40;
  s.max_side = 100;
  s.seed = seed;
  return s;
}

// Detections whose corners come from two different objects.
int cross_boxes(const std::vector<ScoredBox>& dets, const Scene& scene) {
  int n = 0;
  for (const auto& d : dets) {
    int tl = -1, br = -1;
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      const BBox& b = scene.objects[k].box;
      if (std::abs(d.det.box.tlx() - b.tlx()) < 1e-3 && std::abs(d.det.box.tly() - b.tly()) < 1e-3)
        tl = static_cast<int>(k);
      if (std::abs(d.det.box.brx() - b.brx()) < 1e-3 && std::abs(d.det.box.bry() - b.bry()) < 1e-3)
        br = static_cast<int>(k);
    }
    if (tl >= 0 && br >= 0 && tl != br) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("scene generation is deterministic and valid") {
  SceneSpec spec;
  spec.min_clusters = 1;
  spec.max_clusters = 2;
  spec.seed = 42;
  const auto a = generate_scene_with_clusters(spec);
  const auto b = generate_scene_with_clusters(spec);
  CHECK(scene_to_json(a.scene) == scene_to_json(b.scene));
  CHECK(a.cluster_of == b.cluster_of);
  CHECK_NOTHROW(validate_scene(a.scene));
  spec.seed = 43;
  CHECK(scene_to_json(generate_scene(spec)) != scene_to_json(a.scene));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    const Scene s = generate_scene(spec);
    CHECK_NOTHROW(validate_scene(s));
    for (const auto& o : s.objects) {
      CHECK(o.category >= 0);
      CHECK(o.category < spec.num_categories);
    }
  }
}

TEST_CASE("cluster members sit on a grid with the configured gap") {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 0;
  spec.min_clusters = spec.max_clusters = 1;
  spec.min_cluster_size = spec.max_cluster_size = 4;
  spec.size_jitter = 0.0;
  spec.cluster_gap = 6.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto g = generate_scene_with_clusters(spec);
    REQUIRE(g.scene.objects.size() == 4);
    const auto& o = g.scene.objects;
    const double w = o[0].box.width(), h = o[0].box.height();
    for (const auto& m : o) {
      CHECK(m.category == o[0].category);
      CHECK(m.box.width() == doctest::Approx(w));
    }
    // 2x2 layout, row-major.
    CHECK(box_center(o[1].box).x - box_center(o[0].box).x == doctest::Approx(w + 6.0));
    CHECK(box_center(o[2].box).y - box_center(o[0].box).y == doctest::Approx(h + 6.0));
    CHECK(o[1].box.tlx() - o[0].box.brx() == doctest::Approx(6.0));
    CHECK(std::set<int>(g.cluster_of.begin(), g.cluster_of.end()) == std::set<int>{0});
  }
}

TEST_CASE("empty and infeasible scenes") {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 0;
  CHECK(generate_scene(spec).objects.empty());
  SceneSpec tight;
  tight.width = tight.height = 40;
  tight.min_objects = tight.max_objects = 30;
  tight.min_side = 30;
  tight.max_side = 38;
  tight.max_retries = 20;
  CHECK_THROWS_AS(generate_scene(tight), InfeasibleScene);
  SceneSpec bad;
  bad.max_objects = -1;
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
}

TEST_CASE("zero noise recovers every box for every strategy") {
  SceneSpec spec;
  spec.min_clusters = 0;
  spec.max_clusters = 2;
  spec.min_side = 12;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    spec.seed = seed;
    const auto g = generate_scene_with_clusters(spec);
    const Predictions p = render_predictions(g, NoiseModel{}, 4, spec.num_categories, seed);
    for (auto s : kAll) {
      CAPTURE(to_string(s));
      const auto dets = detect(p, probability_decode(), with_strategy(s));
      std::vector<Detection> plain;
      for (const auto& d : dets) plain.push_back(d.det);
      const EvalResult r = evaluate({plain}, {ground_truth_of(g.scene)});
      if (!g.scene.objects.empty()) CHECK(r.ap50 == doctest::Approx(1.0));
      for (const auto& o : g.scene.objects) {
        double best = 0;
        for (const auto& d : dets)
          if (d.det.category == o.category) best = std::max(best, iou(d.det.box, o.box));
        CHECK(best >= 0.98);
      }
    }
  }
}

TEST_CASE("embedding collision in a two-object cluster") {
  NoiseModel noise;
  noise.collision_rate = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_scene_with_clusters(pair_cluster_spec(seed));
    REQUIRE(g.scene.objects.size() == 2);
    const Predictions p = render_predictions(g, noise, 4, 1, seed);
    const auto ae = detect(p, probability_decode(), with_strategy(MatchStrategy::associative_2d));
    const auto cs = detect(p, probability_decode(), with_strategy(MatchStrategy::centripetal));
    CHECK(cross_boxes(ae, g.scene) >= 2);
    CHECK(cross_boxes(cs, g.scene) == 0);
    CHECK(cs.size() == 2);
  }
}

TEST_CASE("centre dropout only affects centre validation") {
  SceneSpec spec;
  spec.seed = 7;
  spec.max_clusters = 1;
  NoiseModel full;
  full.center_dropout = 1.0;
  std::vector<std::vector<Detection>> cv, cs, cs_ref;
  std::vector<std::vector<GroundTruth>> gts;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const auto g = generate_scene_with_clusters(spec);
    gts.push_back(ground_truth_of(g.scene));
    const Predictions dropped = render_predictions(g, full, 4, 3, seed);
    const Predictions kept = render_predictions(g, NoiseModel{}, 4, 3, seed);
    CHECK(dropped.centers.empty());
    auto plain = [](const std::vector<ScoredBox>& v) {
      std::vector<Detection> out;
      for (const auto& d : v) out.push_back(d.det);
      return out;
    };
    cv.push_back(plain(detect(dropped, probability_decode(),
                              with_strategy(MatchStrategy::center_validation))));
    cs.push_back(plain(detect(dropped, probability_decode(), with_strategy(MatchStrategy::centripetal))));
    cs_ref.push_back(plain(detect(kept, probability_decode(), with_strategy(MatchStrategy::centripetal))));
  }
  CHECK(evaluate(cv, gts).ar100 == 0.0);
  CHECK(evaluate(cs, gts).ap == evaluate(cs_ref, gts).ap);
}

TEST_CASE("rendering is deterministic and noise streams are independent") {
  SceneSpec spec;
  spec.seed = 3;
  spec.max_clusters = 1;
  const auto g = generate_scene_with_clusters(spec);
  NoiseModel n;
  n.sigma_pos = 0.3;
  n.sigma_cs = 0.1;
  const Predictions a = render_predictions(g, n, 4, 3, 9);
  const Predictions b = render_predictions(g, n, 4, 3, 9);
  CHECK(a.tl.heat == b.tl.heat);
  CHECK(a.br.shifts == b.br.shifts);
  NoiseModel more = n;
  more.center_dropout = 0.5;
  more.collision_rate = 1.0;
  const Predictions c = render_predictions(g, more, 4, 3, 9);
  CHECK(a.tl.heat == c.tl.heat);
  CHECK(a.tl.shifts == c.tl.shifts);
  CHECK(a.tl.offsets == c.tl.offsets);
}

TEST_CASE("linear shift sigma scaling") {
  NoiseModel n;
  n.sigma_cs = 0.1;
  CHECK(linear_shift_sigma(n, 2.0, 2.0 * std::exp(1.0)) ==
        doctest::Approx(0.1 * 2.0 * (std::exp(1.0) - 1.0)));
  n.sigma_linear = 0.7;
  CHECK(linear_shift_sigma(n, 1.0, 5.0) == 0.7);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(0, 0) != 0);
}

TEST_CASE("benchmark edge cases and determinism") {
  BenchConfig cfg;
  cfg.num_scenes = 0;
  cfg.strategies = {MatchStrategy::centripetal};
  cfg.rows = {NoiseRow{"base", "", {}, {}}};
  CHECK(run_benchmark(cfg).cells.empty());
  cfg.strategies.clear();
  CHECK_THROWS_AS(run_benchmark(cfg), std::invalid_argument);

  cfg.num_scenes = 6;
  cfg.strategies = kAll;
  cfg.scene.max_clusters = 1;
  cfg.rows = {NoiseRow{"cs", "sigma_cs", {0.0, 0.2}, {}}};
  const auto one = run_benchmark(cfg);
  cfg.threads = 3;
  const auto three = run_benchmark(cfg);
  REQUIRE(one.cells.size() == 10);
  CHECK(bench_report_to_json(one, false) == bench_report_to_json(three, false));
  CHECK(bench_report_to_json(one, false).dump() == bench_report_to_json(run_benchmark(cfg), false).dump());
  for (const auto& c : one.cells)
    if (c.value == 0.0) CHECK(c.metrics.ap50 == doctest::Approx(1.0));
}

TEST_CASE("centripetal AP does not improve as shift noise grows") {
  BenchConfig cfg;
  cfg.num_scenes = 50;
  cfg.scene.seed = 11;
  cfg.scene.max_clusters = 1;
  cfg.strategies = {MatchStrategy::centripetal};
  cfg.rows = {NoiseRow{"cs", "sigma_cs", {0.0, 0.1, 0.2, 0.4, 0.8}, {}}};
  cfg.timing = false;
  const auto r = run_benchmark(cfg);
  REQUIRE(r.cells.size() == 5);
  for (std::size_t k = 1; k < r.cells.size(); ++k) {
    CAPTURE(r.cells[k].value);
    CHECK(r.cells[k].metrics.ap <= r.cells[k - 1].metrics.ap);
  }
  CHECK(r.cells.back().metrics.ap < r.cells.front().metrics.ap);
}

TEST_CASE("benchmark config parsing") {
  const auto j = nlohmann::json::parse(R"({
    "num_scenes": 3, "seed": 5,
    "scene": {"width": 256, "height": 256, "max_clusters": 1},
    "strategies": ["centripetal", "associative_1d"],
    "noise_grid": [
      {"label": "pos", "param": "sigma_pos", "values": [0.0, 0.3], "base": {"sigma_cs": 0.05}},
      {"sigma_cs": 0.1, "collision_rate": 0.5}
    ]})");
  const BenchConfig c = bench_config_from_json(j);
  CHECK(c.num_scenes == 3);
  CHECK(c.scene.seed == 5);
  CHECK(c.scene.width == 256);
  CHECK(c.strategies.size() == 2);
  REQUIRE(c.rows.size() == 2);
  CHECK(c.rows[0].param == "sigma_pos");
  CHECK(c.rows[0].base.sigma_cs == 0.05);
  CHECK(c.rows[1].base.collision_rate == 0.5);
  CHECK(c.rows[1].label == "row1");
  CHECK_THROWS_AS(bench_config_from_json(nlohmann::json::parse(R"({"noise_grid": []})")),
                  FormatError);
  CHECK_THROWS_AS(bench_config_from_json(nlohmann::json::parse(
                      R"({"strategies": [], "noise_grid": [{"param": "bogus", "values": [1]}]})")),
                  FormatError);
  const NoiseModel n = noise_from_json(noise_to_json(NoiseModel{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}));
  CHECK(n.peak_score == 0.7);
  CHECK(n.center_dropout == 0.5);
  const SceneSpec s = scene_spec_from_json(scene_spec_to_json(SceneSpec{}));
  CHECK(scene_spec_to_json(s) == scene_spec_to_json(SceneSpec{}));
}
