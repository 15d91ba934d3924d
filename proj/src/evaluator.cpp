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
#include "cornermatch/evaluator.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cornermatch {

namespace {

constexpr int kIouThresholds = 10;
constexpr int kRecallPoints = 101;
constexpr std::array<int, 3> kMaxDets = {1, 10, 100};

struct AreaRange {
  double lo, hi;
};
constexpr std::array<AreaRange, 4> kAreas = {{
    {0.0, 1e10}, {0.0, 32.0 * 32.0}, {32.0 * 32.0, 96.0 * 96.0}, {96.0 * 96.0, 1e10}}};

// Generated like numpy.linspace (start + index * step) so that values on a
// threshold compare the same way as in the reference tooling.
double iou_threshold(int t) {
  return t == kIouThresholds - 1 ? 0.95 : t * ((0.95 - 0.5) / (kIouThresholds - 1)) + 0.5;
}
double recall_threshold(int r) { return r * 0.01; }

// Matching outcome of one (image, category, area range).
struct ImageEval {
  std::vector<double> scores;                        // detections, sorted
  std::array<std::vector<char>, kIouThresholds> tp;  // matched to a counted gt
  std::array<std::vector<char>, kIouThresholds> ignored;
  int num_counted_gt = 0;
};

ImageEval evaluate_image(std::vector<const Detection*> dets,
                         std::vector<const GroundTruth*> gts, AreaRange area,
                         int max_det) {
  auto outside = [&](double a) { return a < area.lo || a > area.hi; };
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection* a, const Detection* b) { return a->score > b->score; });
  if (static_cast<int>(dets.size()) > max_det) dets.resize(max_det);
  // Counted ground truth first, ignored last.
  std::stable_sort(gts.begin(), gts.end(), [&](const GroundTruth* a, const GroundTruth* b) {
    return !outside(a->box.area()) && outside(b->box.area());
  });
  std::vector<char> gt_ignored(gts.size());
  ImageEval e;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    gt_ignored[g] = outside(gts[g]->box.area());
    if (!gt_ignored[g]) ++e.num_counted_gt;
  }
  std::vector<std::vector<double>> ious(dets.size(), std::vector<double>(gts.size()));
  for (std::size_t d = 0; d < dets.size(); ++d) {
    e.scores.push_back(dets[d]->score);
    for (std::size_t g = 0; g < gts.size(); ++g) ious[d][g] = iou(dets[d]->box, gts[g]->box);
  }
  for (int t = 0; t < kIouThresholds; ++t) {
    std::vector<char> gt_taken(gts.size(), 0);
    e.tp[t].assign(dets.size(), 0);
    e.ignored[t].assign(dets.size(), 0);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      double best = std::min(iou_threshold(t), 1.0 - 1e-10);
      int m = -1;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gt_taken[g]) continue;
        // Once matched to a counted gt, never move to an ignored one.
        if (m > -1 && !gt_ignored[m] && gt_ignored[g]) break;
        if (ious[d][g] < best) continue;
        best = ious[d][g];
        m = static_cast<int>(g);
      }
      if (m == -1) {
        e.ignored[t][d] = outside(dets[d]->box.area());
        continue;
      }
      gt_taken[m] = 1;
      e.ignored[t][d] = gt_ignored[m];
      e.tp[t][d] = !gt_ignored[m];
    }
  }
  return e;
}

struct Accumulated {
  double precision_mean = -1;                           // over thresholds, recalls
  std::array<double, kIouThresholds> per_threshold{};  // AP at each threshold
  bool valid = false;
  std::array<double, kIouThresholds> recall{};
};

Accumulated accumulate(const std::vector<ImageEval>& evals) {
  Accumulated acc;
  int npig = 0;
  struct Row {
    double score;
    std::size_t image, index;
  };
  std::vector<Row> rows;
  for (std::size_t im = 0; im < evals.size(); ++im) {
    npig += evals[im].num_counted_gt;
    for (std::size_t d = 0; d < evals[im].scores.size(); ++d)
      rows.push_back({evals[im].scores[d], im, d});
  }
  if (npig == 0) return acc;
  acc.valid = true;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.score > b.score; });
  double total = 0.0;
  for (int t = 0; t < kIouThresholds; ++t) {
    std::vector<double> rc, pr;
    double tp = 0, fp = 0;
    for (const Row& r : rows) {
      const auto& e = evals[r.image];
      if (e.ignored[t][r.index]) continue;
      if (e.tp[t][r.index]) tp += 1; else fp += 1;
      rc.push_back(tp / npig);
      pr.push_back(tp / (tp + fp + std::numeric_limits<double>::epsilon()));
    }
    acc.recall[t] = rc.empty() ? 0.0 : rc.back();
    for (std::size_t i = pr.size(); i-- > 1;) pr[i - 1] = std::max(pr[i - 1], pr[i]);
    double sum = 0.0;
    for (int r = 0; r < kRecallPoints; ++r) {
      const auto it = std::lower_bound(rc.begin(), rc.end(), recall_threshold(r));
      if (it != rc.end()) sum += pr[static_cast<std::size_t>(it - rc.begin())];
    }
    acc.per_threshold[t] = sum / kRecallPoints;
    total += sum;
  }
  acc.precision_mean = total / (kRecallPoints * kIouThresholds);
  return acc;
}

double mean_or_undefined(const std::vector<double>& v) {
  if (v.empty()) return -1.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<int> greedy_match(std::span<const Detection> dets,
                              std::span<const GroundTruth> gts, double iou_threshold) {
  std::vector<int> out(dets.size(), -1);
  std::vector<char> taken(gts.size(), 0);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    double best = iou_threshold;
    int m = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].category != dets[d].category) continue;
      const double o = iou(dets[d].box, gts[g].box);
      if (o < best || (m != -1 && o == best)) continue;
      best = o;
      m = static_cast<int>(g);
    }
    if (m != -1) {
      taken[m] = 1;
      out[d] = m;
    }
  }
  return out;
}

std::optional<double> average_precision(std::span<const bool> matched, int num_gt) {
  if (num_gt < 0) throw std::invalid_argument("num_gt must be >= 0");
  if (num_gt == 0) return std::nullopt;
  std::vector<double> rc, pr;
  double tp = 0, fp = 0;
  for (bool m : matched) {
    if (m) tp += 1; else fp += 1;
    rc.push_back(tp / num_gt);
    pr.push_back(tp / (tp + fp));
  }
  for (std::size_t i = pr.size(); i-- > 1;) pr[i - 1] = std::max(pr[i - 1], pr[i]);
  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const auto it = std::lower_bound(rc.begin(), rc.end(), recall_threshold(r));
    if (it != rc.end()) sum += pr[static_cast<std::size_t>(it - rc.begin())];
  }
  return sum / kRecallPoints;
}

EvalResult evaluate(const std::vector<std::vector<Detection>>& dets,
                    const std::vector<std::vector<GroundTruth>>& gts) {
  if (dets.size() != gts.size()) {
    throw std::invalid_argument("evaluate: detections and ground truth cover different image counts");
  }
  std::set<int> categories;
  for (const auto& im : gts)
    for (const auto& g : im) categories.insert(g.category);
  for (const auto& im : dets)
    for (const auto& d : im) categories.insert(d.category);

  // results[area][maxdet] -> per-category accumulations
  std::array<std::array<std::vector<Accumulated>, kMaxDets.size()>, kAreas.size()> results;
  for (int cat : categories) {
    std::vector<std::vector<const Detection*>> cat_dets(dets.size());
    std::vector<std::vector<const GroundTruth*>> cat_gts(gts.size());
    for (std::size_t im = 0; im < dets.size(); ++im) {
      for (const auto& d : dets[im])
        if (d.category == cat) cat_dets[im].push_back(&d);
      for (const auto& g : gts[im])
        if (g.category == cat) cat_gts[im].push_back(&g);
    }
    for (std::size_t a = 0; a < kAreas.size(); ++a) {
      for (std::size_t m = 0; m < kMaxDets.size(); ++m) {
        // Only the combinations reported in the summary.
        if (a != 0 && kMaxDets[m] != 100) continue;
        std::vector<ImageEval> evals;
        for (std::size_t im = 0; im < dets.size(); ++im) {
          if (cat_dets[im].empty() && cat_gts[im].empty()) continue;
          evals.push_back(evaluate_image(cat_dets[im], cat_gts[im], kAreas[a], kMaxDets[m]));
        }
        results[a][m].push_back(accumulate(evals));
      }
    }
  }

  auto ap_of = [&](std::size_t a, std::size_t m, int only_t) {
    std::vector<double> v;
    for (const auto& acc : results[a][m]) {
      if (!acc.valid) continue;
      if (only_t < 0) {
        for (double x : acc.per_threshold) v.push_back(x);
      } else {
        v.push_back(acc.per_threshold[only_t]);
      }
    }
    return mean_or_undefined(v);
  };
  auto ar_of = [&](std::size_t a, std::size_t m) {
    std::vector<double> v;
    for (const auto& acc : results[a][m])
      if (acc.valid)
        for (double x : acc.recall) v.push_back(x);
    return mean_or_undefined(v);
  };

  EvalResult r;
  r.ap = ap_of(0, 2, -1);
  r.ap50 = ap_of(0, 2, 0);
  r.ap75 = ap_of(0, 2, 5);
  r.ap_small = ap_of(1, 2, -1);
  r.ap_medium = ap_of(2, 2, -1);
  r.ap_large = ap_of(3, 2, -1);
  r.ar1 = ar_of(0, 0);
  r.ar10 = ar_of(0, 1);
  r.ar100 = ar_of(0, 2);
  r.ar_small = ar_of(1, 2);
  r.ar_medium = ar_of(2, 2);
  r.ar_large = ar_of(3, 2);
  return r;
}

}  // namespace cornermatch
