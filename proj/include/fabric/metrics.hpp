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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fabric/grid.hpp"
#include "fabric/stencil.hpp"

namespace fabric {

struct ExperimentRecord {
  KernelKind kernel = KernelKind::laplace2d;
  Dims dims;
  uint32_t iterations = 0;
  uint32_t fpgas = 0;
  uint32_t ips_per_fpga = 0;
  double elapsed_s = 0;
  double gflops = 0;
  double speedup = 0;
};

/// flops/cell * interior cells * iterations / elapsed, in 1e9 flop/s.
/// Boundary cells are copied, not computed, so they do not count.
double compute_gflops(const StencilKernel& kernel, const Dims& dims,
                      uint32_t iterations, double elapsed_s);

/// Fills the speedup column as baseline elapsed over record elapsed.
void compute_speedup(std::vector<ExperimentRecord>& records,
                     std::size_t baseline_index);

/// Fixed columns: kernel,h,w,d,iterations,fpgas,ips_per_fpga,elapsed_s,
/// gflops,speedup.
std::string records_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);

enum class SweepAxis { fpgas, ips, iterations };
enum class Metric { speedup, gflops };

struct ChartSpec {
  SweepAxis x = SweepAxis::fpgas;
  Metric y = Metric::speedup;
  /// Series grouping: one line per kernel (fpga sweeps), per IP count
  /// (iteration sweeps) or per iteration count (IP sweeps).
  enum class Series { kernel, ips, iterations } series = Series::kernel;
  std::string title;
};

/// Standalone SVG line chart, inline styles only.
std::string records_svg(const std::vector<ExperimentRecord>& records,
                        const ChartSpec& spec);

}  // namespace fabric
