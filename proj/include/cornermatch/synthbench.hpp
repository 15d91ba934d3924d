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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cornermatch/decoder.hpp"
#include "cornermatch/encoder.hpp"
#include "cornermatch/evaluator.hpp"
#include "cornermatch/matcher.hpp"

namespace cornermatch {

/// Relative frequency of small / medium / large objects (COCO area buckets).
struct SizeMix {
  double small = 0.2;
  double medium = 0.5;
  double large = 0.3;
};

struct SceneSpec {
  int width = 512;
  int height = 512;
  int num_categories = 3;
  int min_objects = 1;  // isolated objects
  int max_objects = 4;
  int min_clusters = 0;  // groups of near-identical same-category objects
  int max_clusters = 0;
  int min_cluster_size = 2;
  int max_cluster_size = 4;
  // Pixels between the facing edges of neighbouring cluster members;
  // negative values make neighbours overlap.
  double cluster_gap = 4.0;
  double size_jitter = 0.05;    // relative size spread inside a cluster
  double min_side = 16.0;
  double max_side = 192.0;
  double max_overlap = 0.3;     // IoU cap between independently placed objects
  SizeMix sizes;
  std::uint64_t seed = 0;
  int max_retries = 200;

  void validate() const;
};

struct NoiseModel {
  double sigma_pos = 0.0;       // corner jitter, heatmap cells
  double sigma_cs = 0.0;        // centripetal shift jitter, log space
  double sigma_score = 0.0;     // corner and centre score jitter
  double collision_rate = 0.0;  // fraction of clusters sharing one embedding
  double center_dropout = 0.0;  // probability a centre keypoint is missed
  // Additive jitter on linear centre-regression shifts, heatmap cells.
  // Negative: derived from sigma_cs, see linear_shift_sigma().
  double sigma_linear = -1.0;
  double peak_score = 0.9;

  void validate() const;
};

/// Linear-shift jitter equivalent to sigma_cs for objects whose half extents
/// (in heatmap cells) span [lo, hi]: sigma_cs scaled by the ratio of the
/// linear target range to the log target range, (hi - lo) / ln(hi / lo).
/// Returns noise.sigma_linear unchanged when it is non-negative.
double linear_shift_sigma(const NoiseModel& noise, double lo, double hi);

/// Thrown when a scene cannot be packed within the retry budget.
class InfeasibleScene : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed of an independent random stream: splitmix64(seed ^ splitmix64(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Deterministic scene for spec.seed. Cluster members share a category,
/// have near-identical sizes and sit on a grid whose neighbouring boxes are
/// cluster_gap pixels apart, so neighbouring centres are (w + gap) or
/// (h + gap) apart.
Scene generate_scene(const SceneSpec& spec);

/// A generated scene plus the cluster id of each object.
struct GeneratedScene {
  Scene scene;
  std::vector<int> cluster_of;  // -1 for isolated objects
};
GeneratedScene generate_scene_with_clusters(const SceneSpec& spec);

struct Predictions {
  CornerMaps tl;  // heat, offsets, centripetal and linear shifts, 2-D embeddings
  CornerMaps br;
  std::vector<CenterCandidate> centers;
};

/// What a trained head would emit for the scene under the noise model.
/// Starts from exact targets, jitters corner positions, shifts and scores,
/// assigns one embedding per object (shared inside collided clusters) and
/// emits centre keypoints with dropout. Every noise source draws from its own
/// stream derived from `seed`.
Predictions render_predictions(const GeneratedScene& scene, const NoiseModel& noise,
                               int stride, int num_categories, std::uint64_t seed);

/// Keeps the first `n` channels of an embedding map.
Tensor leading_channels(const Tensor& t, int n);

/// Runs decode + the chosen matcher on rendered predictions.
std::vector<ScoredBox> detect(const Predictions& p, const DecodeConfig& decode,
                              const MatchConfig& match);

struct NoiseRow {
  std::string label;
  std::string param;           // NoiseModel field swept along the row; empty = none
  std::vector<double> values;  // one grid cell per value
  NoiseModel base;
};

/// Sets a NoiseModel field by name; throws std::invalid_argument if unknown.
void set_noise_param(NoiseModel& noise, const std::string& name, double value);

struct BenchConfig {
  SceneSpec scene;
  int num_scenes = 100;
  std::vector<NoiseRow> rows;
  std::vector<MatchStrategy> strategies;
  MatchConfig match;
  DecodeConfig decode{4, 100, ScoreActivation::none};
  int threads = 1;
  bool timing = true;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double max_ms = 0.0;
};

struct BenchCell {
  std::string row;
  std::string param;
  double value = 0.0;
  NoiseModel noise;
  MatchStrategy strategy = MatchStrategy::centripetal;
  EvalResult metrics;
  LatencyStats latency;
};

struct BenchReport {
  std::vector<BenchCell> cells;
};

/// For every row value and strategy: generates num_scenes scenes (the same
/// scenes for every cell), renders, decodes, matches and evaluates.
/// Throws std::invalid_argument for an empty strategy list.
BenchReport run_benchmark(const BenchConfig& cfg);

BenchConfig bench_config_from_json(const nlohmann::json& j);
nlohmann::json bench_report_to_json(const BenchReport& r, bool include_timing = true);
nlohmann::json noise_to_json(const NoiseModel& n);
NoiseModel noise_from_json(const nlohmann::json& j, NoiseModel base = {});
nlohmann::json scene_spec_to_json(const SceneSpec& s);
SceneSpec scene_spec_from_json(const nlohmann::json& j, SceneSpec base = {});

}  // namespace cornermatch
