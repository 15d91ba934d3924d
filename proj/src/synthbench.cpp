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
#include "cornermatch/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "cornermatch/json_io.hpp"

namespace cornermatch {

using nlohmann::json;

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t {
  kTagScene = 1,
  kTagCorners,
  kTagScores,
  kTagShifts,
  kTagLinear,
  kTagEmbeddings,
  kTagCenters,
  kTagDropout,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double gauss(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Box size from the size mix: area within the chosen COCO bucket, aspect
// ratio in [1/2, 2], sides clamped to [min_side, max_side].
std::pair<double, double> sample_size(const SceneSpec& spec, Rng& rng) {
  const double total = spec.sizes.small + spec.sizes.medium + spec.sizes.large;
  const double u = uniform(rng, 0.0, total);
  const double min_area = spec.min_side * spec.min_side;
  const double max_area = spec.max_side * spec.max_side;
  double lo, hi;
  if (u < spec.sizes.small) {
    lo = min_area, hi = 32.0 * 32.0;
  } else if (u < spec.sizes.small + spec.sizes.medium) {
    lo = 32.0 * 32.0, hi = 96.0 * 96.0;
  } else {
    lo = 96.0 * 96.0, hi = max_area;
  }
  lo = std::max(lo, min_area);
  hi = std::max(std::min(hi, max_area), lo);
  const double area = uniform(rng, lo, hi);
  const double aspect = std::exp(uniform(rng, -std::log(2.0), std::log(2.0)));
  const double w = std::clamp(std::sqrt(area * aspect), spec.min_side, spec.max_side);
  const double h = std::clamp(std::sqrt(area / aspect), spec.min_side, spec.max_side);
  return {w, h};
}

struct CellKey {
  int category, i, j;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Placement is rejected when a box overlaps an earlier one too much or when
// two corners of the same kind would share a heatmap cell (offset and shift
// maps hold one value per cell for every category).
bool compatible(const std::vector<SceneObject>& placed, const std::vector<SceneObject>& fresh,
                double max_overlap, int cell) {
  auto keys = [cell](const SceneObject& o) {
    return std::array<CellKey, 2>{
        CellKey{0, static_cast<int>(std::floor(o.box.tly() / cell)),
                static_cast<int>(std::floor(o.box.tlx() / cell))},
        CellKey{1, static_cast<int>(std::floor(o.box.bry() / cell)),
                static_cast<int>(std::floor(o.box.brx() / cell))}};
  };
  for (const auto& f : fresh) {
    const auto fk = keys(f);
    for (const auto& p : placed) {
      if (iou(f.box, p.box) > max_overlap) return false;
      const auto pk = keys(p);
      if (fk[0] == pk[0] || fk[1] == pk[1]) return false;
    }
  }
  return true;
}

constexpr int kCellGuard = 4;  // default stride used for collision checks

}  // namespace

void SceneSpec::validate() const {
  require(width > 0 && height > 0, "scene size must be positive");
  require(num_categories >= 1, "num_categories must be >= 1");
  require(min_objects >= 0 && max_objects >= min_objects, "invalid object count range");
  require(min_clusters >= 0 && max_clusters >= min_clusters, "invalid cluster count range");
  require(min_cluster_size >= 1 && max_cluster_size >= min_cluster_size,
          "invalid cluster size range");
  require(cluster_gap > -min_side, "cluster_gap must exceed -min_side");
  require(size_jitter >= 0.0 && size_jitter < 0.5, "size_jitter must be in [0, 0.5)");
  require(min_side > 0.0 && max_side >= min_side, "invalid side range");
  require(sizes.small >= 0 && sizes.medium >= 0 && sizes.large >= 0 &&
              sizes.small + sizes.medium + sizes.large > 0,
          "size mix must be non-negative and not all zero");
  require(max_retries >= 1, "max_retries must be >= 1");
}

void NoiseModel::validate() const {
  require(sigma_pos >= 0 && sigma_cs >= 0 && sigma_score >= 0,
          "noise sigmas must be non-negative");
  require(collision_rate >= 0 && collision_rate <= 1, "collision_rate must be in [0, 1]");
  require(center_dropout >= 0 && center_dropout <= 1, "center_dropout must be in [0, 1]");
  require(peak_score > 0 && peak_score <= 1, "peak_score must be in (0, 1]");
}

double linear_shift_sigma(const NoiseModel& noise, double lo, double hi) {
  if (noise.sigma_linear >= 0.0) return noise.sigma_linear;
  if (!(lo > 0.0) || !(hi > lo)) return noise.sigma_cs * std::max(lo, hi);
  return noise.sigma_cs * (hi - lo) / std::log(hi / lo);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

GeneratedScene generate_scene_with_clusters(const SceneSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, kTagScene));
  GeneratedScene out;
  out.scene.width = spec.width;
  out.scene.height = spec.height;
  auto& objects = out.scene.objects;

  const int clusters = uniform_int(rng, spec.min_clusters, spec.max_clusters);
  for (int c = 0; c < clusters; ++c) {
    const int n = uniform_int(rng, spec.min_cluster_size, spec.max_cluster_size);
    int cols, rows;
    if (n == 4) {
      cols = rows = 2;
    } else if (uniform_int(rng, 0, 1) == 0) {
      cols = n, rows = 1;
    } else {
      cols = 1, rows = n;
    }
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_retries && !placed; ++attempt) {
      const int category = uniform_int(rng, 0, spec.num_categories - 1);
      const auto [w, h] = sample_size(spec, rng);
      const double pitch_x = w + spec.cluster_gap;
      const double pitch_y = h + spec.cluster_gap;
      // Members may grow by size_jitter; keep them inside the image.
      const double margin_x = w * spec.size_jitter / 2 + 1.0;
      const double margin_y = h * spec.size_jitter / 2 + 1.0;
      const double block_w = (cols - 1) * pitch_x + w;
      const double block_h = (rows - 1) * pitch_y + h;
      if (block_w + 2 * margin_x > spec.width || block_h + 2 * margin_y > spec.height) continue;
      const double x0 = uniform(rng, margin_x, spec.width - margin_x - block_w);
      const double y0 = uniform(rng, margin_y, spec.height - margin_y - block_h);
      std::vector<SceneObject> members;
      for (int k = 0; k < n; ++k) {
        const int r = k / cols, q = k % cols;
        const double cx = x0 + w / 2 + q * pitch_x;
        const double cy = y0 + h / 2 + r * pitch_y;
        const double mw = w * (1.0 + uniform(rng, -spec.size_jitter, spec.size_jitter));
        const double mh = h * (1.0 + uniform(rng, -spec.size_jitter, spec.size_jitter));
        members.push_back(
            {BBox(cx - mw / 2, cy - mh / 2, cx + mw / 2, cy + mh / 2), category, std::nullopt});
      }
      if (!compatible(objects, members, spec.max_overlap, kCellGuard)) continue;
      bool self_ok = true;
      for (std::size_t a = 1; a < members.size() && self_ok; ++a) {
        const std::vector<SceneObject> earlier(members.begin(), members.begin() + a);
        self_ok = compatible(earlier, {members[a]}, 1.0, kCellGuard);
      }
      if (!self_ok) continue;
      for (auto& m : members) {
        objects.push_back(std::move(m));
        out.cluster_of.push_back(c);
      }
      placed = true;
    }
    if (!placed) {
      throw InfeasibleScene("cannot place cluster " + std::to_string(c) + " after " +
                            std::to_string(spec.max_retries) + " attempts");
    }
  }

  const int singles = uniform_int(rng, spec.min_objects, spec.max_objects);
  for (int k = 0; k < singles; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_retries && !placed; ++attempt) {
      const int category = uniform_int(rng, 0, spec.num_categories - 1);
      const auto [w, h] = sample_size(spec, rng);
      if (w + 2 > spec.width || h + 2 > spec.height) continue;
      const double x = uniform(rng, 1.0, spec.width - 1.0 - w);
      const double y = uniform(rng, 1.0, spec.height - 1.0 - h);
      std::vector<SceneObject> one{{BBox(x, y, x + w, y + h), category, std::nullopt}};
      if (!compatible(objects, one, spec.max_overlap, kCellGuard)) continue;
      objects.push_back(std::move(one.front()));
      out.cluster_of.push_back(-1);
      placed = true;
    }
    if (!placed) {
      throw InfeasibleScene("cannot place object " + std::to_string(k) + " after " +
                            std::to_string(spec.max_retries) + " attempts");
    }
  }
  return out;
}

Scene generate_scene(const SceneSpec& spec) {
  return generate_scene_with_clusters(spec).scene;
}

Predictions render_predictions(const GeneratedScene& gen, const NoiseModel& noise,
                               int stride, int num_categories, std::uint64_t seed) {
  noise.validate();
  const Scene& scene = gen.scene;
  validate_scene(scene);
  require(stride >= 1, "stride must be >= 1");
  const int nc = std::max(num_categories, infer_num_categories(scene));
  const int mh = (scene.height + stride - 1) / stride;
  const int mw = (scene.width + stride - 1) / stride;
  const double s = stride;

  Rng corner_rng(derive_seed(seed, kTagCorners));
  Rng score_rng(derive_seed(seed, kTagScores));
  Rng shift_rng(derive_seed(seed, kTagShifts));
  Rng linear_rng(derive_seed(seed, kTagLinear));
  Rng embed_rng(derive_seed(seed, kTagEmbeddings));
  Rng center_rng(derive_seed(seed, kTagCenters));
  Rng dropout_rng(derive_seed(seed, kTagDropout));

  double lo = 0.0, hi = 0.0;
  for (const auto& o : scene.objects) {
    for (double half : {o.box.width() / (2 * s), o.box.height() / (2 * s)}) {
      lo = lo == 0.0 ? half : std::min(lo, half);
      hi = std::max(hi, half);
    }
  }
  const double sigma_lin = linear_shift_sigma(noise, lo, hi);

  Predictions p;
  for (CornerMaps* m : {&p.tl, &p.br}) {
    m->heat = Tensor(nc, mh, mw);
    m->offsets = Tensor(2, mh, mw);
    m->shifts = Tensor(2, mh, mw);
    m->linear_shifts = Tensor(2, mh, mw);
    m->embeddings = Tensor(2, mh, mw);
  }

  // One identity per object, shared by every member of a collided cluster.
  int max_cluster = -1;
  for (int c : gen.cluster_of) max_cluster = std::max(max_cluster, c);
  std::vector<char> collided(static_cast<std::size_t>(max_cluster + 1), 0);
  for (auto& c : collided) c = uniform(embed_rng, 0.0, 1.0) < noise.collision_rate;
  std::vector<int> identity(scene.objects.size());
  std::vector<int> cluster_identity(collided.size(), -1);
  int next_identity = 0;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const int c = k < gen.cluster_of.size() ? gen.cluster_of[k] : -1;
    if (c >= 0 && collided[c]) {
      if (cluster_identity[c] < 0) cluster_identity[c] = next_identity++;
      identity[k] = cluster_identity[c];
    } else {
      identity[k] = next_identity++;
    }
  }
  std::vector<int> perm_x(next_identity), perm_y(next_identity);
  for (int k = 0; k < next_identity; ++k) perm_x[k] = perm_y[k] = k;
  std::shuffle(perm_x.begin(), perm_x.end(), embed_rng);
  std::shuffle(perm_y.begin(), perm_y.end(), embed_rng);

  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& o = scene.objects[k];
    const BBox& b = o.box;
    const Point ct = box_center(b);

    double tlx = b.tlx() + s * gauss(corner_rng, noise.sigma_pos);
    double tly = b.tly() + s * gauss(corner_rng, noise.sigma_pos);
    double brx = b.brx() + s * gauss(corner_rng, noise.sigma_pos);
    double bry = b.bry() + s * gauss(corner_rng, noise.sigma_pos);
    tlx = std::clamp(tlx, 0.0, static_cast<double>(scene.width));
    brx = std::clamp(brx, 0.0, static_cast<double>(scene.width));
    tly = std::clamp(tly, 0.0, static_cast<double>(scene.height));
    bry = std::clamp(bry, 0.0, static_cast<double>(scene.height));

    const double radius_f = gaussian_radius(b.width() / s, b.height() / s, 0.3);
    const int radius = std::max(0, static_cast<int>(radius_f));

    const double cs[4] = {std::log((ct.x - b.tlx()) / s), std::log((ct.y - b.tly()) / s),
                          std::log((b.brx() - ct.x) / s), std::log((b.bry() - ct.y) / s)};
    const double emb[2] = {2.0 * perm_x[identity[k]], 2.0 * perm_y[identity[k]]};

    struct Corner {
      CornerMaps* maps;
      double x, y;
      const double* cs;
      bool top_left;
    } corners[2] = {{&p.tl, tlx, tly, cs, true}, {&p.br, brx, bry, cs + 2, false}};

    for (const auto& c : corners) {
      const int i = corner_cell(c.y, stride, mh);
      const int j = corner_cell(c.x, stride, mw);
      const float peak = static_cast<float>(
          std::clamp(noise.peak_score + gauss(score_rng, noise.sigma_score), 0.01, 1.0));
      draw_gaussian(c.maps->heat, o.category, i, j, radius, peak);
      c.maps->offsets.at(0, i, j) = static_cast<float>(c.x / s - j);
      c.maps->offsets.at(1, i, j) = static_cast<float>(c.y / s - i);
      c.maps->shifts.at(0, i, j) = static_cast<float>(c.cs[0] + gauss(shift_rng, noise.sigma_cs));
      c.maps->shifts.at(1, i, j) = static_cast<float>(c.cs[1] + gauss(shift_rng, noise.sigma_cs));
      // Centre-regression target: from the true rounded corner cell to the
      // exact centre, in the guiding-shift layout.
      const double gx = c.top_left ? ct.x / s - std::floor(b.tlx() / s)
                                   : corner_cell(b.brx(), stride, mw) - ct.x / s;
      const double gy = c.top_left ? ct.y / s - std::floor(b.tly() / s)
                                   : corner_cell(b.bry(), stride, mh) - ct.y / s;
      c.maps->linear_shifts->at(0, i, j) = static_cast<float>(gx + gauss(linear_rng, sigma_lin));
      c.maps->linear_shifts->at(1, i, j) = static_cast<float>(gy + gauss(linear_rng, sigma_lin));
      c.maps->embeddings->at(0, i, j) = static_cast<float>(emb[0]);
      c.maps->embeddings->at(1, i, j) = static_cast<float>(emb[1]);
    }

    const Point jittered{ct.x + s * gauss(center_rng, noise.sigma_pos),
                         ct.y + s * gauss(center_rng, noise.sigma_pos)};
    const double score =
        std::clamp(noise.peak_score + gauss(center_rng, noise.sigma_score), 0.01, 1.0);
    if (uniform(dropout_rng, 0.0, 1.0) >= noise.center_dropout) {
      p.centers.push_back({jittered, o.category, score});
    }
  }
  return p;
}

Tensor leading_channels(const Tensor& t, int n) {
  require(n >= 0 && n <= t.channels(), "channel count out of range");
  Tensor out(n, t.height(), t.width());
  for (int c = 0; c < n; ++c) {
    auto src = t.plane(c);
    std::copy(src.begin(), src.end(), out.plane(c).begin());
  }
  return out;
}

std::vector<ScoredBox> detect(const Predictions& p, const DecodeConfig& decode,
                              const MatchConfig& match_cfg) {
  CornerMaps tl = p.tl, br = p.br;
  if (match_cfg.strategy == MatchStrategy::associative_1d) {
    tl.embeddings = leading_channels(*p.tl.embeddings, 1);
    br.embeddings = leading_channels(*p.br.embeddings, 1);
  }
  const auto cands = decode_corners(tl, br, decode);
  return match(cands.tl, cands.br, p.centers, match_cfg);
}

void set_noise_param(NoiseModel& noise, const std::string& name, double value) {
  if (name == "sigma_pos") noise.sigma_pos = value;
  else if (name == "sigma_cs") noise.sigma_cs = value;
  else if (name == "sigma_score") noise.sigma_score = value;
  else if (name == "collision_rate") noise.collision_rate = value;
  else if (name == "center_dropout") noise.center_dropout = value;
  else if (name == "sigma_linear") noise.sigma_linear = value;
  else if (name == "peak_score") noise.peak_score = value;
  else throw std::invalid_argument("unknown noise parameter '" + name + "'");
}

namespace {

struct SceneResult {
  std::vector<std::vector<Detection>> dets;  // per strategy
  std::vector<double> latency_ms;            // per strategy
};

LatencyStats summarize(std::vector<double> ms) {
  LatencyStats s;
  if (ms.empty()) return s;
  std::sort(ms.begin(), ms.end());
  double sum = 0.0;
  for (double v : ms) sum += v;
  s.mean_ms = sum / static_cast<double>(ms.size());
  s.p50_ms = ms[ms.size() / 2];
  s.max_ms = ms.back();
  return s;
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
  if (cfg.strategies.empty()) throw std::invalid_argument("benchmark needs at least one strategy");
  require(cfg.num_scenes >= 0, "num_scenes must be >= 0");
  cfg.scene.validate();
  cfg.match.validate();
  BenchReport report;
  if (cfg.num_scenes == 0) return report;

  using Clock = std::chrono::steady_clock;
  const int n = cfg.num_scenes;
  std::vector<GeneratedScene> scenes(n);
  std::vector<std::vector<GroundTruth>> gts(n);
  std::vector<std::uint64_t> scene_seeds(n);
  for (int k = 0; k < n; ++k) {
    SceneSpec spec = cfg.scene;
    spec.seed = scene_seeds[k] = derive_seed(cfg.scene.seed, static_cast<std::uint64_t>(k));
    scenes[k] = generate_scene_with_clusters(spec);
    gts[k] = ground_truth_of(scenes[k].scene);
  }
  const int stride = cfg.decode.stride;
  const double lo = cfg.scene.min_side / (2.0 * stride);
  const double hi = cfg.scene.max_side / (2.0 * stride);

  for (const auto& row : cfg.rows) {
    std::vector<double> values = row.values;
    if (values.empty()) values.push_back(0.0);
    for (double value : values) {
      NoiseModel noise = row.base;
      if (!row.param.empty()) set_noise_param(noise, row.param, value);
      noise.sigma_linear = linear_shift_sigma(noise, lo, hi);
      noise.validate();

      std::vector<SceneResult> results(n);
      auto work = [&](int k) {
        const auto render_seed = derive_seed(scene_seeds[k], 0x5eed);
        const Predictions pred = render_predictions(scenes[k], noise, stride,
                                                    cfg.scene.num_categories, render_seed);
        SceneResult& r = results[k];
        const auto t0 = Clock::now();
        const auto cands = decode_corners(pred.tl, pred.br, cfg.decode);
        const double decode_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        for (MatchStrategy strategy : cfg.strategies) {
          MatchConfig mc = cfg.match;
          mc.strategy = strategy;
          mc.stride = stride;
          std::vector<CornerCandidate> tls = cands.tl, brs = cands.br;
          if (strategy == MatchStrategy::associative_1d) {
            for (auto* list : {&tls, &brs})
              for (auto& c : *list) c.embedding.resize(1);
          }
          const auto t1 = Clock::now();
          const auto boxes = match(tls, brs, pred.centers, mc);
          const double match_ms =
              std::chrono::duration<double, std::milli>(Clock::now() - t1).count();
          std::vector<Detection> dets;
          dets.reserve(boxes.size());
          for (const auto& b : boxes) dets.push_back(b.det);
          r.dets.push_back(std::move(dets));
          r.latency_ms.push_back(decode_ms + match_ms);
        }
      };
      const int threads = std::max(1, std::min(cfg.threads, n));
      if (threads == 1) {
        for (int k = 0; k < n; ++k) work(k);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            for (int k = t; k < n; k += threads) work(k);
          });
        }
        for (auto& th : pool) th.join();
      }

      for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
        std::vector<std::vector<Detection>> dets(n);
        std::vector<double> ms(n);
        for (int k = 0; k < n; ++k) {
          dets[k] = results[k].dets[s];
          ms[k] = results[k].latency_ms[s];
        }
        BenchCell cell;
        cell.row = row.label;
        cell.param = row.param;
        cell.value = value;
        cell.noise = noise;
        cell.strategy = cfg.strategies[s];
        cell.metrics = evaluate(dets, gts);
        if (cfg.timing) cell.latency = summarize(ms);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

json noise_to_json(const NoiseModel& n) {
  return {{"sigma_pos", n.sigma_pos},           {"sigma_cs", n.sigma_cs},
          {"sigma_score", n.sigma_score},       {"collision_rate", n.collision_rate},
          {"center_dropout", n.center_dropout}, {"sigma_linear", n.sigma_linear},
          {"peak_score", n.peak_score}};
}

NoiseModel noise_from_json(const json& j, NoiseModel base) {
  if (!j.is_object()) throw FormatError("noise model must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw FormatError("noise." + key + " must be a number");
    try {
      set_noise_param(base, key, value.get<double>());
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("noise: ") + e.what());
    }
  }
  return base;
}

json scene_spec_to_json(const SceneSpec& s) {
  return {{"width", s.width},
          {"height", s.height},
          {"num_categories", s.num_categories},
          {"min_objects", s.min_objects},
          {"max_objects", s.max_objects},
          {"min_clusters", s.min_clusters},
          {"max_clusters", s.max_clusters},
          {"min_cluster_size", s.min_cluster_size},
          {"max_cluster_size", s.max_cluster_size},
          {"cluster_gap", s.cluster_gap},
          {"size_jitter", s.size_jitter},
          {"min_side", s.min_side},
          {"max_side", s.max_side},
          {"max_overlap", s.max_overlap},
          {"sizes", {{"small", s.sizes.small}, {"medium", s.sizes.medium}, {"large", s.sizes.large}}},
          {"seed", s.seed},
          {"max_retries", s.max_retries}};
}

SceneSpec scene_spec_from_json(const json& j, SceneSpec s) {
  if (!j.is_object()) throw FormatError("scene spec must be an object");
  auto num = [&](const char* k, auto& dst) {
    if (!j.contains(k)) return;
    if (!j.at(k).is_number()) throw FormatError(std::string("scene.") + k + " must be a number");
    dst = j.at(k).get<std::remove_reference_t<decltype(dst)>>();
  };
  num("width", s.width);
  num("height", s.height);
  num("num_categories", s.num_categories);
  num("min_objects", s.min_objects);
  num("max_objects", s.max_objects);
  num("min_clusters", s.min_clusters);
  num("max_clusters", s.max_clusters);
  num("min_cluster_size", s.min_cluster_size);
  num("max_cluster_size", s.max_cluster_size);
  num("cluster_gap", s.cluster_gap);
  num("size_jitter", s.size_jitter);
  num("min_side", s.min_side);
  num("max_side", s.max_side);
  num("max_overlap", s.max_overlap);
  num("seed", s.seed);
  num("max_retries", s.max_retries);
  if (j.contains("sizes")) {
    const json& m = j.at("sizes");
    if (!m.is_object()) throw FormatError("scene.sizes must be an object");
    s.sizes.small = m.value("small", s.sizes.small);
    s.sizes.medium = m.value("medium", s.sizes.medium);
    s.sizes.large = m.value("large", s.sizes.large);
  }
  return s;
}

BenchConfig bench_config_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("benchmark config must be an object");
  BenchConfig cfg;
  if (j.contains("scene")) cfg.scene = scene_spec_from_json(j.at("scene"));
  if (j.contains("seed")) cfg.scene.seed = j.at("seed").get<std::uint64_t>();
  cfg.num_scenes = j.value("num_scenes", cfg.num_scenes);
  cfg.decode.stride = j.value("stride", cfg.decode.stride);
  cfg.decode.top_k = j.value("topk", cfg.decode.top_k);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("match")) {
    const json& m = j.at("match");
    cfg.match.mu_policy.large_mu = m.value("mu_large", cfg.match.mu_policy.large_mu);
    cfg.match.mu_policy.small_mu = m.value("mu_small", cfg.match.mu_policy.small_mu);
    cfg.match.mu_policy.area_threshold =
        m.value("area_threshold", cfg.match.mu_policy.area_threshold);
    cfg.match.soft_nms_sigma = m.value("soft_nms_sigma", cfg.match.soft_nms_sigma);
    cfg.match.final_keep = m.value("final_keep", cfg.match.final_keep);
    cfg.match.ae_threshold = m.value("ae_threshold", cfg.match.ae_threshold);
  }
  if (!j.contains("strategies") || !j.at("strategies").is_array()) {
    throw FormatError("benchmark config: missing field 'strategies'");
  }
  for (const auto& s : j.at("strategies")) {
    if (!s.is_string()) throw FormatError("strategies must be strings");
    try {
      cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (!j.contains("noise_grid") || !j.at("noise_grid").is_array()) {
    throw FormatError("benchmark config: missing field 'noise_grid'");
  }
  int index = 0;
  for (const auto& r : j.at("noise_grid")) {
    if (!r.is_object()) throw FormatError("noise_grid rows must be objects");
    NoiseRow row;
    row.label = r.value("label", "row" + std::to_string(index));
    if (r.contains("base") || r.contains("param")) {
      if (r.contains("base")) row.base = noise_from_json(r.at("base"));
      row.param = r.value("param", "");
      if (r.contains("values")) row.values = r.at("values").get<std::vector<double>>();
      if (!row.param.empty()) {
        NoiseModel probe;
        try {
          set_noise_param(probe, row.param, 0.0);
        } catch (const std::invalid_argument& e) {
          throw FormatError(e.what());
        }
        if (row.values.empty()) throw FormatError("noise_grid row '" + row.label + "' has no values");
      }
    } else {
      json noise = r;
      noise.erase("label");
      row.base = noise_from_json(noise);
    }
    cfg.rows.push_back(std::move(row));
    ++index;
  }
  return cfg;
}

json bench_report_to_json(const BenchReport& r, bool include_timing) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json e = {{"row", c.row},
              {"param", c.param},
              {"value", c.value},
              {"strategy", to_string(c.strategy)},
              {"noise", noise_to_json(c.noise)},
              {"metrics", eval_to_json(c.metrics)}};
    if (include_timing) {
      e["latency_ms"] = {{"mean", c.latency.mean_ms},
                         {"p50", c.latency.p50_ms},
                         {"max", c.latency.max_ms}};
    }
    cells.push_back(std::move(e));
  }
  return {{"cells", std::move(cells)}};
}

}  // namespace cornermatch
