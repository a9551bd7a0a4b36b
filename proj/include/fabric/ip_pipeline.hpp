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
#include <span>
#include <vector>

#include "fabric/grid.hpp"
#include "fabric/stencil.hpp"

namespace fabric {

/// Eight float32 cells per 256-bit stream word.
constexpr uint32_t kPeCount = 8;
constexpr uint32_t kBeatBytes = 32;

struct StreamBeat {
  std::array<float, kPeCount> cells{};
  bool last = false;
};

/// Row-major cell order, final beat zero-padded and flagged last.
std::vector<StreamBeat> grid_to_beats(const Grid& grid);
Grid beats_to_grid(std::span<const StreamBeat> beats, const Dims& dims);

/// Cells the line buffer must hold before the first window is complete:
/// one window height of rows (plus planes for rank-3) and a window width.
uint64_t ip_fill_cells(const StencilKernel& kernel, const Dims& dims);

struct IpStreamResult {
  std::vector<StreamBeat> beats;
  uint64_t fill_cycles = 0;   // cycles before the first output beat
  uint64_t total_cycles = 0;  // fill + one cycle per beat
};

/// Streams a grid through the shift-register accelerator model: cells
/// enter in row-major order, taps read the line buffer once the window is
/// full, boundary cells pass through unchanged. Output cell values match
/// apply_stencil bit-for-bit.
IpStreamResult ip_process_stream(const StencilKernel& kernel,
                                 const Dims& dims,
                                 std::span<const StreamBeat> in_beats);

}  // namespace fabric
