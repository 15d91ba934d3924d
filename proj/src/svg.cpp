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
#include "cornermatch/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "cornermatch/kernels.hpp"

namespace cornermatch {

namespace {

constexpr int kWidth = 480;
constexpr int kHeight = 320;
constexpr int kMargin = 48;

const std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& os, int w, int h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string ap_curve_svg(const BenchReport& report, const std::string& row) {
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  std::vector<std::string> order;
  std::string param;
  for (const auto& c : report.cells) {
    if (c.row != row) continue;
    const std::string name = to_string(c.strategy);
    if (!curves.count(name)) order.push_back(name);
    curves[name].emplace_back(c.value, std::max(0.0, c.metrics.ap));
    param = c.param;
  }
  if (order.empty()) return {};

  double x_lo = INFINITY, x_hi = -INFINITY;
  for (const auto& [_, pts] : curves) {
    for (const auto& [x, y] : pts) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kHeight - kMargin - y * plot_h; };

  std::ostringstream os;
  open_svg(os, kWidth, kHeight);
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(row) << "</text>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << py(0) << "\" x2=\"" << kWidth - kMargin
     << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << py(0) << "\" x2=\"" << kMargin << "\" y2=\""
     << py(1) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = t / 4.0;
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(py(y) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << num(y) << "</text>\n";
    const double x = x_lo + (x_hi - x_lo) * t / 4.0;
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << kHeight - kMargin + 14
       << "\" text-anchor=\"middle\" font-size=\"10\">" << num(x) << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(param.empty() ? "value" : param)
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << kHeight / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
     << kHeight / 2 << ")\" text-anchor=\"middle\">AP</text>\n";

  for (std::size_t k = 0; k < order.size(); ++k) {
    auto pts = curves[order[k]];
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const char* color = kColors[k % kColors.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) os << num(px(x)) << ',' << num(py(y)) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : pts) {
      os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\""
         << color << "\"/>\n";
    }
    const int ly = kMargin + 14 * static_cast<int>(k);
    os << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << ly << "\" font-size=\"10\" fill=\""
       << color << "\">" << escape(order[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string sampling_scatter_svg(const Tensor& offsets, int kernel_size, int i, int j) {
  const auto pts = deform_sampling_points(offsets, kernel_size, i, j);
  const int r = kernel_size / 2;
  double lo_x = j - r, hi_x = j + r, lo_y = i - r, hi_y = i + r;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0}) + 2.0;
  const int side = kHeight;
  const double scale = (side - 2 * kMargin) / span;
  auto sx = [&](double x) { return kMargin + (x - lo_x + 1.0) * scale; };
  auto sy = [&](double y) { return kMargin + (y - lo_y + 1.0) * scale; };

  std::ostringstream os;
  open_svg(os, side, side);
  for (int a = -r; a <= r; ++a) {
    for (int b = -r; b <= r; ++b) {
      os << "<circle cx=\"" << num(sx(j + b)) << "\" cy=\"" << num(sy(i + a))
         << "\" r=\"3\" fill=\"none\" stroke=\"#888\"/>\n";
    }
  }
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const int a = static_cast<int>(t) / kernel_size - r, b = static_cast<int>(t) % kernel_size - r;
    os << "<line x1=\"" << num(sx(j + b)) << "\" y1=\"" << num(sy(i + a)) << "\" x2=\""
       << num(sx(pts[t].x)) << "\" y2=\"" << num(sy(pts[t].y)) << "\" stroke=\"#bbb\"/>\n";
    os << "<circle cx=\"" << num(sx(pts[t].x)) << "\" cy=\"" << num(sy(pts[t].y))
       << "\" r=\"3\" fill=\"#d62728\"/>\n";
  }
  os << "<circle cx=\"" << num(sx(j)) << "\" cy=\"" << num(sy(i))
     << "\" r=\"5\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace cornermatch
