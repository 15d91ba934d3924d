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
#include "cornermatch/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "CLI11.hpp"

#include "cornermatch/encoder.hpp"
#include "cornermatch/json_io.hpp"
#include "cornermatch/svg.hpp"
#include "cornermatch/synthbench.hpp"
#include "cornermatch/tensor.hpp"

namespace cornermatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tensor files written by encode, in manifest order.
const std::vector<std::string> kMapNames = {"tl_heat", "br_heat", "tl_off",   "br_off",
                                            "tl_cs",   "br_cs",   "tl_guide", "br_guide"};

int resolved_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

std::string file_label(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out.empty() ? "row" : out;
}

Tensor read_listed(const fs::path& dir, const json& files, const std::string& name) {
  if (!files.contains(name) || !files.at(name).is_string()) {
    throw FormatError("manifest: missing field 'tensors." + name + "'");
  }
  return read_ctsr(dir / files.at(name).get<std::string>());
}

}  // namespace

void RunConfig::validate() const {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (top_k < 1) throw ConfigError("topk must be >= 1");
  if (num_categories < 0) throw ConfigError("num-categories must be >= 0");
  if (radius && *radius < 0) throw ConfigError("radius must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  try {
    match.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ScoreActivation parse_activation(const std::string& name) {
  if (name == "channel_softmax") return ScoreActivation::channel_softmax;
  if (name == "spatial_softmax") return ScoreActivation::spatial_softmax;
  if (name == "sigmoid") return ScoreActivation::sigmoid;
  if (name == "none") return ScoreActivation::none;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(ScoreActivation a) {
  switch (a) {
    case ScoreActivation::channel_softmax: return "channel_softmax";
    case ScoreActivation::spatial_softmax: return "spatial_softmax";
    case ScoreActivation::sigmoid: return "sigmoid";
    case ScoreActivation::none: return "none";
  }
  return "none";
}

void cmd_encode(const fs::path& scene_path, const fs::path& out_dir, const RunConfig& cfg) {
  cfg.validate();
  const Scene scene = scene_from_json(read_json_file(scene_path));
  EncoderConfig ecfg;
  ecfg.stride = cfg.stride;
  ecfg.num_categories = cfg.num_categories;
  if (cfg.radius) ecfg.radius = RadiusPolicy::fixed(*cfg.radius);
  const TargetMaps maps = encode_targets(scene, ecfg);

  fs::create_directories(out_dir);
  const std::vector<const Tensor*> tensors = {&maps.tl.heat,    &maps.br.heat,   &maps.tl.offsets,
                                              &maps.br.offsets, &maps.tl.shifts, &maps.br.shifts,
                                              &maps.tl.guiding, &maps.br.guiding};
  json files = json::object();
  for (std::size_t k = 0; k < kMapNames.size(); ++k) {
    const std::string file = kMapNames[k] + ".ctsr";
    write_ctsr(out_dir / file, *tensors[k]);
    files[kMapNames[k]] = file;
  }
  if (!maps.mask_objects.empty()) {
    write_ctsr(out_dir / "masks.ctsr", maps.masks);
    files["masks"] = "masks.ctsr";
  }
  json manifest = {{"stride", maps.stride},
                   {"num_categories", maps.num_categories},
                   {"width", scene.width},
                   {"height", scene.height},
                   {"heat_activation", "none"},
                   {"tensors", files}};
  if (!maps.mask_objects.empty()) manifest["mask_objects"] = maps.mask_objects;
  write_json_file(out_dir / "manifest.json", manifest);
}

json cmd_detect(const fs::path& maps_dir, const RunConfig& cfg,
                const std::optional<fs::path>& centers_path) {
  cfg.validate();
  const json manifest = read_json_file(maps_dir / "manifest.json");
  if (!manifest.contains("tensors") || !manifest.at("tensors").is_object()) {
    throw FormatError("manifest: missing field 'tensors'");
  }
  const json& files = manifest.at("tensors");

  CornerMaps tl, br;
  tl.heat = read_listed(maps_dir, files, "tl_heat");
  br.heat = read_listed(maps_dir, files, "br_heat");
  tl.offsets = read_listed(maps_dir, files, "tl_off");
  br.offsets = read_listed(maps_dir, files, "br_off");
  tl.shifts = read_listed(maps_dir, files, "tl_cs");
  br.shifts = read_listed(maps_dir, files, "br_cs");
  // Linear centre-regression shifts share the guiding-shift layout.
  const std::string tl_lin = files.contains("tl_linear") ? "tl_linear" : "tl_guide";
  const std::string br_lin = files.contains("br_linear") ? "br_linear" : "br_guide";
  if (files.contains(tl_lin)) tl.linear_shifts = read_listed(maps_dir, files, tl_lin);
  if (files.contains(br_lin)) br.linear_shifts = read_listed(maps_dir, files, br_lin);
  if (files.contains("tl_emb")) tl.embeddings = read_listed(maps_dir, files, "tl_emb");
  if (files.contains("br_emb")) br.embeddings = read_listed(maps_dir, files, "br_emb");

  std::vector<CenterCandidate> centers;
  std::optional<fs::path> cpath = centers_path;
  if (!cpath && files.contains("centers")) cpath = maps_dir / files.at("centers").get<std::string>();
  if (cpath) centers = centers_from_json(read_json_file(*cpath));

  DecodeConfig dcfg;
  dcfg.stride = cfg.stride;
  dcfg.top_k = cfg.top_k;
  dcfg.activation = ScoreActivation::channel_softmax;
  if (manifest.contains("heat_activation")) {
    try {
      dcfg.activation = parse_activation(manifest.at("heat_activation").get<std::string>());
    } catch (const ConfigError& e) {
      throw FormatError(std::string("manifest.heat_activation: ") + e.what());
    }
  }
  if (cfg.activation) dcfg.activation = *cfg.activation;

  MatchConfig mcfg = cfg.match;
  mcfg.stride = cfg.stride;
  const bool associative = mcfg.strategy == MatchStrategy::associative_1d ||
                           mcfg.strategy == MatchStrategy::associative_2d;
  if (associative && (!tl.embeddings || !br.embeddings)) {
    throw MissingInput("embeddings required");
  }
  if (mcfg.strategy == MatchStrategy::center_regression &&
      (!tl.linear_shifts || !br.linear_shifts)) {
    throw MissingInput("center-regression shifts required");
  }
  if (mcfg.strategy == MatchStrategy::center_validation && !cpath) {
    throw MissingInput("center keypoints required");
  }
  if (mcfg.strategy == MatchStrategy::associative_1d) {
    tl.embeddings = leading_channels(*tl.embeddings, 1);
    br.embeddings = leading_channels(*br.embeddings, 1);
  }

  const DecodeResult cands = decode_corners(tl, br, dcfg);
  for (const auto& w : cands.warnings) std::cerr << "warning: " << w << '\n';
  return detections_to_json(match(cands.tl, cands.br, centers, mcfg));
}

json cmd_eval(const fs::path& detections, const fs::path& ground_truth,
              std::vector<std::string>* warnings) {
  std::vector<std::vector<Detection>> dets;
  std::vector<std::vector<GroundTruth>> gts;
  if (fs::is_directory(ground_truth)) {
    if (!fs::is_directory(detections)) {
      throw FormatError("detections must be a directory when ground truth is a directory");
    }
    std::map<std::string, fs::path> scenes;
    for (const auto& e : fs::directory_iterator(ground_truth)) {
      if (e.path().extension() == ".json") scenes[e.path().stem().string()] = e.path();
    }
    for (const auto& [stem, path] : scenes) {
      const fs::path det_path = detections / (stem + ".json");
      gts.push_back(ground_truth_of(scene_from_json(read_json_file(path))));
      if (fs::exists(det_path)) {
        dets.push_back(detections_from_json(read_json_file(det_path)));
      } else {
        dets.emplace_back();
        if (warnings) warnings->push_back("no detections for " + stem);
      }
    }
  } else {
    dets.push_back(detections_from_json(read_json_file(detections)));
    gts.push_back(ground_truth_of(scene_from_json(read_json_file(ground_truth))));
  }
  if (warnings) {
    std::set<int> gt_cats, det_cats;
    for (const auto& g : gts)
      for (const auto& x : g) gt_cats.insert(x.category);
    for (const auto& d : dets)
      for (const auto& x : d) det_cats.insert(x.category);
    for (int c : det_cats) {
      if (!gt_cats.count(c)) {
        warnings->push_back("category " + std::to_string(c) + " has no ground truth");
      }
    }
  }
  return eval_to_json(evaluate(dets, gts));
}

json cmd_bench(const fs::path& config, const RunConfig& cfg,
               const std::optional<fs::path>& plot_dir) {
  cfg.validate();
  const json j = read_json_file(config);
  BenchConfig bc = bench_config_from_json(j);
  if (cfg.seed) bc.scene.seed = *cfg.seed;
  bc.threads = resolved_threads(cfg.threads);
  bc.timing = cfg.timing;
  const BenchReport report = run_benchmark(bc);
  json out = bench_report_to_json(report, cfg.timing);

  if (plot_dir) {
    fs::create_directories(*plot_dir);
    std::set<std::string> seen;
    for (const auto& row : bc.rows) {
      if (!seen.insert(row.label).second) continue;
      const std::string svg = ap_curve_svg(report, row.label);
      if (!svg.empty()) write_text(*plot_dir / ("ap_" + file_label(row.label) + ".svg"), svg);
    }
    if (j.contains("dcn_scatter")) {
      const json& s = j.at("dcn_scatter");
      if (!s.is_object() || !s.contains("offsets") || !s.contains("cell")) {
        throw FormatError("dcn_scatter needs 'offsets' and 'cell'");
      }
      fs::path offsets_path = s.at("offsets").get<std::string>();
      if (offsets_path.is_relative()) offsets_path = config.parent_path() / offsets_path;
      const auto cell = s.at("cell").get<std::vector<int>>();
      if (cell.size() != 2) throw FormatError("dcn_scatter.cell must be [row, col]");
      const Tensor offsets = read_ctsr(offsets_path);
      write_text(*plot_dir / "dcn_scatter.svg",
                 sampling_scatter_svg(offsets, s.value("kernel", 3), cell[0], cell[1]));
    }
  }
  return out;
}

namespace {

struct Flags {
  std::optional<int> stride, topk, threads, num_categories, radius;
  std::optional<std::string> strategy, activation;
  std::optional<double> mu_large, mu_small, area_threshold, soft_nms_sigma;
  std::optional<std::uint64_t> seed;
  std::string config;
};

template <typename T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (dst || !j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("config.") + key + " has the wrong type");
  }
}

RunConfig resolve(Flags f) {
  if (!f.config.empty()) {
    const json j = read_json_file(f.config);
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    take(j, "stride", f.stride);
    take(j, "topk", f.topk);
    take(j, "threads", f.threads);
    take(j, "num_categories", f.num_categories);
    take(j, "radius", f.radius);
    take(j, "strategy", f.strategy);
    take(j, "activation", f.activation);
    take(j, "mu_large", f.mu_large);
    take(j, "mu_small", f.mu_small);
    take(j, "area_threshold", f.area_threshold);
    take(j, "soft_nms_sigma", f.soft_nms_sigma);
    take(j, "seed", f.seed);
  }
  RunConfig rc;
  if (f.stride) rc.stride = *f.stride;
  if (f.topk) rc.top_k = *f.topk;
  if (f.threads) rc.threads = *f.threads;
  if (f.num_categories) rc.num_categories = *f.num_categories;
  rc.radius = f.radius;
  rc.seed = f.seed;
  if (f.strategy) {
    try {
      rc.match.strategy = parse_strategy(*f.strategy);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.activation) rc.activation = parse_activation(*f.activation);
  if (f.mu_large) rc.match.mu_policy.large_mu = *f.mu_large;
  if (f.mu_small) rc.match.mu_policy.small_mu = *f.mu_small;
  if (f.area_threshold) rc.match.mu_policy.area_threshold = *f.area_threshold;
  if (f.soft_nms_sigma) rc.match.soft_nms_sigma = *f.soft_nms_sigma;
  rc.match.stride = rc.stride;
  rc.validate();
  return rc;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON file setting any flag; explicit flags win");
  cmd->add_option("--stride", f.stride, "output stride (default 4)");
  cmd->add_option("--topk", f.topk, "corners kept per kind (default 100)");
  cmd->add_option("--strategy", f.strategy,
                  "centripetal | center_regression | associative_1d | associative_2d | "
                  "center_validation");
  cmd->add_option("--mu-large", f.mu_large, "central-region scale for large boxes");
  cmd->add_option("--mu-small", f.mu_small, "central-region scale for small boxes");
  cmd->add_option("--area-threshold", f.area_threshold, "box area above which mu-large applies");
  cmd->add_option("--soft-nms-sigma", f.soft_nms_sigma, "Gaussian soft-NMS sigma");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--threads", f.threads, "worker threads (default: all cores)");
  cmd->add_option("--num-categories", f.num_categories, "heatmap channels (default: infer)");
  cmd->add_option("--activation", f.activation,
                  "channel_softmax | spatial_softmax | sigmoid | none");
  cmd->add_option("--radius", f.radius, "fixed heatmap Gaussian radius in cells");
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(out_path, j);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corner-pair object detection post-processing toolkit", "cornermatch"};
  app.require_subcommand(1);
  Flags flags;
  std::string in_a, in_b, out_path, centers, plot_dir;
  bool no_timing = false;

  auto* encode = app.add_subcommand("encode", "scene JSON -> target tensors + manifest");
  encode->add_option("scene", in_a, "scene JSON")->required();
  encode->add_option("out_dir", in_b, "output directory")->required();
  add_common(encode, flags);

  auto* detect = app.add_subcommand("detect", "maps directory -> detections JSON");
  detect->add_option("maps_dir", in_a, "directory holding manifest.json")->required();
  detect->add_option("-o,--output", out_path, "detections JSON (default stdout)");
  detect->add_option("--centers", centers, "centre keypoints JSON");
  add_common(detect, flags);

  auto* eval = app.add_subcommand("eval", "detections + ground truth -> metrics JSON");
  eval->add_option("detections", in_a, "detections JSON or directory")->required();
  eval->add_option("ground_truth", in_b, "scene JSON or directory")->required();
  eval->add_option("-o,--output", out_path, "report JSON (default stdout)");

  auto* bench = app.add_subcommand("bench", "benchmark config -> report JSON");
  bench->add_option("config_file", in_a, "benchmark config JSON")->required();
  bench->add_option("-o,--output", out_path, "report JSON (default stdout)");
  bench->add_option("--plot", plot_dir, "directory for SVG plots");
  bench->add_flag("--no-timing", no_timing, "omit latency statistics");
  add_common(bench, flags);

  std::vector<std::string> argv_store = {"cornermatch"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (encode->parsed()) {
      cmd_encode(in_a, in_b, resolve(flags));
    } else if (detect->parsed()) {
      const RunConfig rc = resolve(flags);
      std::optional<fs::path> c;
      if (!centers.empty()) c = centers;
      emit(cmd_detect(in_a, rc, c), out_path, out);
    } else if (eval->parsed()) {
      std::vector<std::string> warnings;
      const json report = cmd_eval(in_a, in_b, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      emit(report, out_path, out);
    } else if (bench->parsed()) {
      RunConfig rc = resolve(flags);
      rc.timing = !no_timing;
      std::optional<fs::path> p;
      if (!plot_dir.empty()) p = plot_dir;
      emit(cmd_bench(in_a, rc, p), out_path, out);
    }
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace cornermatch
