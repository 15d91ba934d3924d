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
#include "cornermatch/json_io.hpp"

#include <fstream>

namespace cornermatch {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw FormatError(where + " must be an integer");
  return v.get<int>();
}

BBox bbox_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) {
    throw FormatError(where + " must be an array [tlx, tly, brx, bry]");
  }
  try {
    return BBox(number(v[0], where), number(v[1], where), number(v[2], where),
                number(v[3], where));
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
}

json bbox_to(const BBox& b) { return json::array({b.tlx(), b.tly(), b.brx(), b.bry()}); }

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

Scene scene_from_json(const json& j) {
  Scene s;
  s.width = integer(field(j, "width", "scene"), "width");
  s.height = integer(field(j, "height", "scene"), "height");
  const json& objs = field(j, "objects", "scene");
  if (!objs.is_array()) throw FormatError("objects must be an array");
  for (std::size_t k = 0; k < objs.size(); ++k) {
    const std::string where = "objects[" + std::to_string(k) + "]";
    const json& o = objs[k];
    SceneObject obj{bbox_from(field(o, "bbox", where), where + ".bbox"),
                    integer(field(o, "category", where), where + ".category"),
                    std::nullopt};
    if (o.contains("mask") && !o.at("mask").is_null()) {
      const json& m = o.at("mask");
      if (!m.is_array() || m.size() != 28 * 28) {
        throw FormatError(where + ".mask must hold 784 values");
      }
      std::vector<float> mask;
      mask.reserve(m.size());
      for (const auto& v : m) mask.push_back(static_cast<float>(number(v, where + ".mask")));
      obj.mask = std::move(mask);
    }
    s.objects.push_back(std::move(obj));
  }
  return s;
}

json scene_to_json(const Scene& scene) {
  json objs = json::array();
  for (const auto& o : scene.objects) {
    json e = {{"bbox", bbox_to(o.box)}, {"category", o.category}};
    if (o.mask) e["mask"] = *o.mask;
    objs.push_back(std::move(e));
  }
  return {{"width", scene.width}, {"height", scene.height}, {"objects", std::move(objs)}};
}

json detections_to_json(const std::vector<ScoredBox>& boxes) {
  json out = json::array();
  for (const auto& b : boxes) {
    out.push_back({{"bbox", bbox_to(b.det.box)},
                   {"category", b.det.category},
                   {"score", b.det.score},
                   {"weight", b.weight}});
  }
  return out;
}

std::vector<Detection> detections_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("detections must be an array");
  std::vector<Detection> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "detections[" + std::to_string(k) + "]";
    const json& d = j[k];
    out.push_back({bbox_from(field(d, "bbox", where), where + ".bbox"),
                   integer(field(d, "category", where), where + ".category"),
                   number(field(d, "score", where), where + ".score")});
  }
  return out;
}

std::vector<CenterCandidate> centers_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("centers must be an array");
  std::vector<CenterCandidate> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "centers[" + std::to_string(k) + "]";
    const json& c = j[k];
    out.push_back({{number(field(c, "x", where), where + ".x"),
                    number(field(c, "y", where), where + ".y")},
                   integer(field(c, "category", where), where + ".category"),
                   c.contains("score") ? number(c.at("score"), where + ".score") : 1.0});
  }
  return out;
}

json centers_to_json(const std::vector<CenterCandidate>& centers) {
  json out = json::array();
  for (const auto& c : centers) {
    out.push_back({{"x", c.pos.x}, {"y", c.pos.y}, {"category", c.category}, {"score", c.score}});
  }
  return out;
}

json eval_to_json(const EvalResult& r) {
  return {{"AP", r.ap},           {"AP50", r.ap50},           {"AP75", r.ap75},
          {"AP_S", r.ap_small},   {"AP_M", r.ap_medium},      {"AP_L", r.ap_large},
          {"AR_1", r.ar1},        {"AR_10", r.ar10},          {"AR_100", r.ar100},
          {"AR_S", r.ar_small},   {"AR_M", r.ar_medium},      {"AR_L", r.ar_large}};
}

EvalResult eval_from_json(const json& j) {
  EvalResult r;
  auto get = [&](const char* k) { return number(field(j, k, "eval report"), k); };
  r.ap = get("AP");
  r.ap50 = get("AP50");
  r.ap75 = get("AP75");
  r.ap_small = get("AP_S");
  r.ap_medium = get("AP_M");
  r.ap_large = get("AP_L");
  r.ar1 = get("AR_1");
  r.ar10 = get("AR_10");
  r.ar100 = get("AR_100");
  r.ar_small = get("AR_S");
  r.ar_medium = get("AR_M");
  r.ar_large = get("AR_L");
  return r;
}

std::vector<GroundTruth> ground_truth_of(const Scene& scene) {
  std::vector<GroundTruth> out;
  out.reserve(scene.objects.size());
  for (const auto& o : scene.objects) out.push_back({o.box, o.category});
  return out;
}

}  // namespace cornermatch
