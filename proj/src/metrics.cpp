/*
 * Copyright 2026 The fpga-fabric Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fabric/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "fabric/error.hpp"

namespace fabric {

double compute_gflops(const StencilKernel& kernel, const Dims& dims,
                      uint32_t iterations, double elapsed_s) {
  if (elapsed_s <= 0) throw ConfigError("elapsed time must be positive");
  const double flops = static_cast<double>(flops_per_cell(kernel)) *
                       static_cast<double>(dims.interior_cells()) *
                       static_cast<double>(iterations);
  return flops / elapsed_s / 1e9;
}

void compute_speedup(std::vector<ExperimentRecord>& records,
                     std::size_t baseline_index) {
  if (baseline_index >= records.size())
    throw ConfigError("speedup baseline record is missing");
  const double base = records[baseline_index].elapsed_s;
  if (base <= 0) throw ConfigError("baseline elapsed time must be positive");
  for (ExperimentRecord& r : records) {
    if (r.elapsed_s <= 0) throw ConfigError("record elapsed time must be positive");
    r.speedup = base / r.elapsed_s;
  }
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw ConfigError("no records to report");
  std::string out =
      "kernel,h,w,d,iterations,fpgas,ips_per_fpga,elapsed_s,gflops,speedup\n";
  for (const ExperimentRecord& r : records) {
    out += std::string(kernel_name(r.kernel)) + "," + std::to_string(r.dims.h) +
           "," + std::to_string(r.dims.w) + "," + std::to_string(r.dims.d) +
           "," + std::to_string(r.iterations) + "," + std::to_string(r.fpgas) +
           "," + std::to_string(r.ips_per_fpga) + "," + fmt(r.elapsed_s) +
           "," + fmt(r.gflops) + "," + fmt(r.speedup) + "\n";
  }
  return out;
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "kernel,h,w,d,iterations,fpgas,ips_per_fpga,elapsed_s,gflops,"
              "speedup")
    throw ConfigError("bad results CSV header");
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw ConfigError("bad results CSV row: " + line);
    ExperimentRecord r;
    r.kernel = kernel_from_name(fields[0]);
    r.dims.h = static_cast<uint32_t>(std::stoul(fields[1]));
    r.dims.w = static_cast<uint32_t>(std::stoul(fields[2]));
    r.dims.d = static_cast<uint32_t>(std::stoul(fields[3]));
    r.dims.rank = r.dims.d > 1 ? 3 : 2;
    r.iterations = static_cast<uint32_t>(std::stoul(fields[4]));
    r.fpgas = static_cast<uint32_t>(std::stoul(fields[5]));
    r.ips_per_fpga = static_cast<uint32_t>(std::stoul(fields[6]));
    r.elapsed_s = std::stod(fields[7]);
    r.gflops = std::stod(fields[8]);
    r.speedup = std::stod(fields[9]);
    records.push_back(r);
  }
  return records;
}

namespace {

double axis_value(const ExperimentRecord& r, SweepAxis a) {
  switch (a) {
    case SweepAxis::fpgas: return r.fpgas;
    case SweepAxis::ips: return r.ips_per_fpga;
    case SweepAxis::iterations: return r.iterations;
  }
  return 0;
}

std::string series_label(const ExperimentRecord& r, ChartSpec::Series s) {
  switch (s) {
    case ChartSpec::Series::kernel: return kernel_name(r.kernel);
    case ChartSpec::Series::ips: return std::to_string(r.ips_per_fpga) + " IPs";
    case ChartSpec::Series::iterations:
      return std::to_string(r.iterations) + " iters";
  }
  return "";
}

const char* axis_label(SweepAxis a) {
  switch (a) {
    case SweepAxis::fpgas: return "FPGAs";
    case SweepAxis::ips: return "IPs per FPGA";
    case SweepAxis::iterations: return "iterations";
  }
  return "";
}

const char* kPalette[] = {"#e8b100", "#2a6fd6", "#d63c2a", "#2a9d4e",
                          "#e07c22", "#7c4fd6", "#2ab5c9", "#8a8a8a"};

}  // namespace

std::string records_svg(const std::vector<ExperimentRecord>& records,
                        const ChartSpec& spec) {
  if (records.empty()) throw ConfigError("no records to plot");
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double xmin = 1e300, xmax = -1e300, ymax = 0;
  for (const ExperimentRecord& r : records) {
    double x = axis_value(r, spec.x);
    double y = spec.y == Metric::speedup ? r.speedup : r.gflops;
    series[series_label(r, spec.series)].push_back({x, y});
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymax = std::max(ymax, y);
  }
  for (auto& [_, pts] : series) std::sort(pts.begin(), pts.end());
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= 0) ymax = 1;
  ymax *= 1.08;

  const double W = 640, H = 420, L = 64, R = 160, T = 40, B = 48;
  const double pw = W - L - R, ph = H - T - B;
  auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return T + ph - y / ymax * ph; };

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << spec.title << "</text>\n";

  // axes + ticks
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                L, T + ph, L + pw, T + ph);
  svg << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                L, T, L, T + ph);
  svg << buf;
  for (int i = 0; i <= 4; ++i) {
    double yv = ymax * i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#dddddd\"/>\n",
                  L, Y(yv), L + pw, Y(yv));
    svg << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  L - 6, Y(yv) + 4, yv);
    svg << buf;
  }
  std::map<double, bool> xticks;
  for (const auto& [_, pts] : series)
    for (const auto& [x, y] : pts) xticks[x] = true;
  for (const auto& [xv, _] : xticks) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.6g</text>\n",
                  X(xv), T + ph + 16, xv);
    svg << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                L + pw / 2, H - 12, axis_label(spec.x));
  svg << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" font-size=\"12\" "
                "transform=\"rotate(-90 16 %.1f)\">%s</text>\n",
                T + ph / 2, T + ph / 2,
                spec.y == Metric::speedup ? "speedup" : "GFLOPS");
  svg << buf;

  int si = 0;
  for (const auto& [label, pts] : series) {
    const char* color = kPalette[si % 8];
    std::string path;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "",
                    X(pts[i].first), Y(pts[i].second));
      path += buf;
    }
    svg << "<polyline points=\"" << path << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    for (const auto& [x, y] : pts) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    X(x), Y(y), color);
      svg << buf;
    }
    double ly = T + 16 + 18 * si;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"%s\" stroke-width=\"2\"/>\n",
                  L + pw + 12, ly, L + pw + 34, ly, color);
    svg << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\">%s</text>\n",
                  L + pw + 40, ly + 4, label.c_str());
    svg << buf;
    ++si;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fabric
