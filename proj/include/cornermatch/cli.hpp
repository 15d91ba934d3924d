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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cornermatch/decoder.hpp"
#include "cornermatch/matcher.hpp"

namespace cornermatch {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;

/// Invalid option value or a strategy whose inputs are missing.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  int stride = 4;
  int top_k = 100;
  MatchConfig match;
  std::optional<ScoreActivation> activation;  // unset: as recorded with the maps
  int num_categories = 0;                     // 0: infer
  std::optional<int> radius;                  // fixed heatmap radius; unset: IoU-based
  std::optional<std::uint64_t> seed;
  int threads = 0;                            // 0: all cores
  bool timing = true;

  void validate() const;  // throws ConfigError
};

ScoreActivation parse_activation(const std::string& name);
std::string to_string(ScoreActivation a);

/// Writes the per-corner heat, offset, centripetal-shift and guiding-shift
/// tensors (plus masks when present) and manifest.json into out_dir.
void cmd_encode(const std::filesystem::path& scene, const std::filesystem::path& out_dir,
                const RunConfig& cfg);

/// Decodes and matches the maps listed in maps_dir/manifest.json.
nlohmann::json cmd_detect(const std::filesystem::path& maps_dir, const RunConfig& cfg,
                          const std::optional<std::filesystem::path>& centers = std::nullopt);

/// Scores detections against a scene file, or a directory of detection files
/// against a directory of scene files paired by file stem. Warnings (such as
/// categories absent from the ground truth) are appended to `warnings`.
nlohmann::json cmd_eval(const std::filesystem::path& detections,
                        const std::filesystem::path& ground_truth,
                        std::vector<std::string>* warnings = nullptr);

/// Runs the benchmark grid. With plot_dir set, writes one AP curve per grid
/// row and, if the config names an offset field, a sampling-point scatter.
nlohmann::json cmd_bench(const std::filesystem::path& config, const RunConfig& cfg,
                         const std::optional<std::filesystem::path>& plot_dir = std::nullopt);

/// Full command line (without the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cornermatch
