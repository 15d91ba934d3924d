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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "eval_fixtures.hpp"
#include "oracles.hpp"

#include "cornermatch/cli.hpp"
#include "cornermatch/json_io.hpp"
#include "cornermatch/synthbench.hpp"
#include "cornermatch/tensor.hpp"

using namespace cornermatch;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("cornermatch_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kThreeBoxes = R"({"width": 128, "height": 96, "objects": [
  {"bbox": [10.3, 12.7, 50.1, 60.2], "category": 0},
  {"bbox": [60, 20, 120, 90], "category": 1},
  {"bbox": [5, 70, 30, 94], "category": 0}]})";

}  // namespace

TEST_CASE("encode writes eight tensors and a manifest") {
  TempDir d("encode");
  write(d.path / "scene.json", R"({"width": 64, "height": 64, "objects": [{"bbox": [4, 4, 40, 30], "category": 0}]})");
  const Run r = run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string()});
  REQUIRE(r.code == 0);
  int tensors = 0;
  for (const auto& e : fs::directory_iterator(d.path / "maps")) tensors += e.path().extension() == ".ctsr";
  CHECK(tensors == 8);
  const json m = read_json_file(d.path / "maps" / "manifest.json");
  CHECK(m["stride"] == 4);
  CHECK(m["num_categories"] == 1);
  CHECK(m["heat_activation"] == "none");
  CHECK(read_ctsr(d.path / "maps" / "tl_heat.ctsr").shape() == Shape{1, 16, 16});
}

TEST_CASE("encode of an empty scene gives all-zero tensors") {
  TempDir d("empty");
  write(d.path / "scene.json", R"({"width": 32, "height": 32, "objects": []})");
  REQUIRE(run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string(),
               "--num-categories", "2"}).code == 0);
  for (const auto& e : fs::directory_iterator(d.path / "maps")) {
    if (e.path().extension() != ".ctsr") continue;
    const Tensor t = read_ctsr(e.path());
    for (float v : t.data()) CHECK(v == 0.0f);
  }
  const Run det = run({"detect", (d.path / "maps").string()});
  CHECK(det.code == 0);
  CHECK(json::parse(det.out) == json::array());
}

TEST_CASE("input errors exit with code 2") {
  TempDir d("errors");
  write(d.path / "oob.json", R"({"width": 10, "height": 10, "objects": [{"bbox": [1, 1, 20, 5], "category": 0}]})");
  const Run oob = run({"encode", (d.path / "oob.json").string(), (d.path / "m").string()});
  CHECK(oob.code == 2);
  CHECK(oob.err.find("object 0 outside image") != std::string::npos);
  write(d.path / "bad.json", R"({"width": 10, "objects": []})");
  const Run bad = run({"encode", (d.path / "bad.json").string(), (d.path / "m").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("height") != std::string::npos);
  write(d.path / "broken.json", "{not json");
  CHECK(run({"encode", (d.path / "broken.json").string(), (d.path / "m").string()}).code == 2);
  const Run missing = run({"detect", (d.path / "nowhere").string()});
  CHECK(missing.code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("encode then detect round trip") {
  TempDir d("roundtrip");
  write(d.path / "scene.json", kThreeBoxes);
  REQUIRE(run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string()}).code == 0);
  const Run r = run({"detect", (d.path / "maps").string(), "-o", (d.path / "dets.json").string()});
  REQUIRE(r.code == 0);
  const auto dets = detections_from_json(read_json_file(d.path / "dets.json"));
  const Scene scene = scene_from_json(json::parse(kThreeBoxes));
  REQUIRE(dets.size() == 3);
  for (const auto& o : scene.objects) {
    double best = 0;
    for (const auto& x : dets)
      if (x.category == o.category) best = std::max(best, iou(x.box, o.box));
    CHECK(best >= 0.98);
  }
  const Run rc = run({"detect", (d.path / "maps").string(), "--strategy", "center_regression"});
  CHECK(rc.code == 0);
  CHECK(json::parse(rc.out).size() == 3);
}

TEST_CASE("composed commands equal the in-process pipeline") {
  TempDir d("compose");
  write(d.path / "scene.json", kThreeBoxes);
  REQUIRE(run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string()}).code == 0);
  const Run r = run({"detect", (d.path / "maps").string()});
  REQUIRE(r.code == 0);
  const Scene scene = scene_from_json(json::parse(kThreeBoxes));
  const TargetMaps t = encode_targets(scene, EncoderConfig{});
  const CornerMaps tl{t.tl.heat, t.tl.offsets, t.tl.shifts, t.tl.guiding, std::nullopt};
  const CornerMaps br{t.br.heat, t.br.offsets, t.br.shifts, t.br.guiding, std::nullopt};
  const auto cands = decode_corners(tl, br, DecodeConfig{4, 100, ScoreActivation::none});
  const json direct = detections_to_json(match(cands.tl, cands.br, {}, MatchConfig{}));
  CHECK(json::parse(r.out).dump() == direct.dump());
}

TEST_CASE("missing strategy inputs exit with code 3") {
  TempDir d("config");
  write(d.path / "scene.json", kThreeBoxes);
  REQUIRE(run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string()}).code == 0);
  const Run ae = run({"detect", (d.path / "maps").string(), "--strategy", "associative_2d"});
  CHECK(ae.code == 3);
  CHECK(ae.err.find("embeddings required") != std::string::npos);
  CHECK(run({"detect", (d.path / "maps").string(), "--strategy", "center_validation"}).code == 3);
  CHECK(run({"detect", (d.path / "maps").string(), "--mu-large", "1.5"}).code == 3);
  CHECK(run({"detect", (d.path / "maps").string(), "--strategy", "magic"}).code == 3);
}

TEST_CASE("config file sets flags and explicit flags win") {
  TempDir d("flags");
  write(d.path / "scene.json", kThreeBoxes);
  REQUIRE(run({"encode", (d.path / "scene.json").string(), (d.path / "maps").string()}).code == 0);
  write(d.path / "cfg.json", R"({"topk": 1})");
  const Run one = run({"detect", (d.path / "maps").string(), "--config", (d.path / "cfg.json").string()});
  REQUIRE(one.code == 0);
  CHECK(json::parse(one.out).size() == 1);
  const Run all = run({"detect", (d.path / "maps").string(), "--config",
                       (d.path / "cfg.json").string(), "--topk", "100"});
  REQUIRE(all.code == 0);
  CHECK(json::parse(all.out).size() == 3);
}

TEST_CASE("eval reports metrics") {
  TempDir d("eval");
  write(d.path / "scene.json", kThreeBoxes);
  const Scene scene = scene_from_json(json::parse(kThreeBoxes));
  std::vector<ScoredBox> perfect;
  for (const auto& o : scene.objects) perfect.push_back({{o.box, o.category, 0.9}, 1.0, {}, {}});
  write_json_file(d.path / "perfect.json", detections_to_json(perfect));
  write(d.path / "none.json", "[]");
  const Run p = run({"eval", (d.path / "perfect.json").string(), (d.path / "scene.json").string()});
  REQUIRE(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(pj["AP"].get<double>() == doctest::Approx(1.0));
  CHECK(pj["AR_100"].get<double>() == doctest::Approx(1.0));
  const Run n = run({"eval", (d.path / "none.json").string(), (d.path / "scene.json").string()});
  CHECK(json::parse(n.out)["AP"].get<double>() == 0.0);
}

TEST_CASE("eval over directories matches the reference") {
  TempDir d("evaldir");
  fs::create_directories(d.path / "gt");
  fs::create_directories(d.path / "det");
  const auto c = fixtures::random_case("cli", 77, 4);
  for (std::size_t im = 0; im < c.gts.size(); ++im) {
    Scene s{400, 400, {}};
    for (const auto& g : c.gts[im]) s.objects.push_back({g.box, g.category, std::nullopt});
    write_json_file(d.path / "gt" / ("img" + std::to_string(im) + ".json"), scene_to_json(s));
    std::vector<ScoredBox> boxes;
    for (const auto& x : c.dets[im]) boxes.push_back({x, 1.0, {}, {}});
    write_json_file(d.path / "det" / ("img" + std::to_string(im) + ".json"), detections_to_json(boxes));
  }
  const Run r = run({"eval", (d.path / "det").string(), (d.path / "gt").string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto ref = oracle::reference_evaluate(c.dets, c.gts);
  CHECK(std::abs(j["AP"].get<double>() - ref.ap) < 1e-6);
  CHECK(std::abs(j["AR_10"].get<double>() - ref.ar10) < 1e-6);
}

TEST_CASE("bench emits a report and one plot per grid row") {
  TempDir d("bench");
  write(d.path / "bench.json", R"({
    "num_scenes": 4, "seed": 1,
    "scene": {"max_clusters": 1},
    "strategies": ["centripetal", "associative_2d"],
    "noise_grid": [
      {"label": "pos", "param": "sigma_pos", "values": [0.0, 0.3]},
      {"label": "collisions", "param": "collision_rate", "values": [0.0, 1.0]},
      {"label": "flat"}
    ]})");
  const Run r = run({"bench", (d.path / "bench.json").string(), "-o", (d.path / "report.json").string(),
                     "--plot", (d.path / "plots").string(), "--threads", "2"});
  REQUIRE(r.code == 0);
  const json rep = read_json_file(d.path / "report.json");
  CHECK(rep["cells"].size() == 10);
  CHECK(rep["cells"][0].contains("latency_ms"));
  int svgs = 0;
  for (const auto& e : fs::directory_iterator(d.path / "plots")) svgs += e.path().extension() == ".svg";
  CHECK(svgs == 3);

  const Run a = run({"bench", (d.path / "bench.json").string(), "--no-timing", "--threads", "1"});
  const Run b = run({"bench", (d.path / "bench.json").string(), "--no-timing", "--threads", "3"});
  CHECK(a.out == b.out);

  write(d.path / "empty.json", R"({"strategies": [], "noise_grid": [{"label": "x"}]})");
  CHECK(run({"bench", (d.path / "empty.json").string()}).code == 2);
  write(d.path / "badgrid.json", R"({"strategies": ["centripetal"], "noise_grid": [{"param": "nope", "values": [1]}]})");
  CHECK(run({"bench", (d.path / "badgrid.json").string()}).code == 2);
}

TEST_CASE("bench draws a sampling-point scatter for a given offset field") {
  TempDir d("scatter");
  Tensor off(18, 6, 6);
  off.at(0, 3, 3) = -1.5f;
  write_ctsr(d.path / "off.ctsr", off);
  write(d.path / "bench.json", R"({"num_scenes": 1, "strategies": ["centripetal"],
    "noise_grid": [{"label": "base"}],
    "dcn_scatter": {"offsets": "off.ctsr", "kernel": 3, "cell": [3, 3]}})");
  REQUIRE(run({"bench", (d.path / "bench.json").string(), "--plot", (d.path / "p").string(),
               "-o", (d.path / "r.json").string()}).code == 0);
  std::ifstream in(d.path / "p" / "dcn_scatter.svg");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("<svg") == 0);
  CHECK(ss.str().find("circle") != std::string::npos);
}

TEST_CASE("shipped benchmark config parses, comments included") {
  const json j =
      read_json_file(fs::path(CORNERMATCH_SOURCE_DIR) / "tools" / "configs" / "crowd.json");
  const BenchConfig cfg = bench_config_from_json(j);
  CHECK(cfg.num_scenes == 200);
  CHECK(cfg.scene.cluster_gap == 0.0);
  CHECK(cfg.strategies.size() == 5);
  REQUIRE(!cfg.rows.empty());
  CHECK(cfg.rows[0].base.collision_rate == 0.8);
  CHECK(cfg.rows[0].base.sigma_pos == 0.3);
  CHECK(cfg.rows[0].base.sigma_cs == 0.05);
}
