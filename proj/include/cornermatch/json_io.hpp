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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cornermatch/encoder.hpp"
#include "cornermatch/evaluator.hpp"
#include "cornermatch/matcher.hpp"

namespace cornermatch {

/// Malformed structured input. The message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// {"width","height","objects":[{"bbox":[tlx,tly,brx,bry],"category":int,
//  "mask":optional 784 values}]}
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);

// [{"bbox":[...],"category":int,"score":real,"weight":real}]
nlohmann::json detections_to_json(const std::vector<ScoredBox>& boxes);
std::vector<Detection> detections_from_json(const nlohmann::json& j);

// [{"x","y","category","score"}]
std::vector<CenterCandidate> centers_from_json(const nlohmann::json& j);
nlohmann::json centers_to_json(const std::vector<CenterCandidate>& centers);

nlohmann::json eval_to_json(const EvalResult& r);
EvalResult eval_from_json(const nlohmann::json& j);

std::vector<GroundTruth> ground_truth_of(const Scene& scene);

}  // namespace cornermatch
