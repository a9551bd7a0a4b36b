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

#include "fabric/ip_pipeline.hpp"

#include <cstddef>

#include "fabric/error.hpp"

namespace fabric {

std::vector<StreamBeat> grid_to_beats(const Grid& grid) {
  grid.validate();
  const std::size_t cells = grid.data.size();
  const std::size_t nbeats = (cells + kPeCount - 1) / kPeCount;
  std::vector<StreamBeat> beats(nbeats);
  for (std::size_t c = 0; c < cells; ++c)
    beats[c / kPeCount].cells[c % kPeCount] = grid.data[c];
  beats.back().last = true;
  return beats;
}

Grid beats_to_grid(std::span<const StreamBeat> beats, const Dims& dims) {
  const std::size_t cells = dims.cells();
  const std::size_t nbeats = (cells + kPeCount - 1) / kPeCount;
  if (beats.size() != nbeats)
    throw SimError("beat count " + std::to_string(beats.size()) +
                   " does not cover grid " + dims.str());
  Grid g;
  g.dims = dims;
  g.data.resize(cells);
  for (std::size_t c = 0; c < cells; ++c)
    g.data[c] = beats[c / kPeCount].cells[c % kPeCount];
  g.validate();
  return g;
}

uint64_t ip_fill_cells(const StencilKernel& kernel, const Dims& dims) {
  uint64_t span = 2ull * dims.row_stride() + 3;
  if (kernel_rank(kernel.kind) == 3) span += 2ull * dims.plane_stride();
  return span;
}

namespace {

/// Tap schedule of one kernel over a flat row-major stream: offsets are
/// relative to the center cell, listed in formula order.
struct TapPlan {
  std::vector<std::ptrdiff_t> offsets;
  std::vector<float> coeffs;  // empty for plain-sum kernels
  float scale = 1.0f;         // applied after the sum when coeffs is empty
};

TapPlan make_tap_plan(const StencilKernel& k, const Dims& dims) {
  const std::ptrdiff_t w = static_cast<std::ptrdiff_t>(dims.row_stride());
  const std::ptrdiff_t hw = static_cast<std::ptrdiff_t>(dims.plane_stride());
  TapPlan plan;
  switch (k.kind) {
    case KernelKind::laplace2d:
      plan.offsets = {-1, -w, +w, +1};
      plan.scale = 0.25f;
      break;
    case KernelKind::diffusion2d:
      plan.offsets = {-1, -w, 0, +w, +1};
      plan.coeffs = k.coeffs;
      break;
    case KernelKind::jacobi9pt2d:
      plan.offsets = {-w - 1, -1, +w - 1, -w, 0, +w, -w + 1, +1, +w + 1};
      plan.coeffs = k.coeffs;
      break;
    case KernelKind::laplace3d:
      if (k.laplace3d_six_point) {
        plan.offsets = {-1, -w, +w, +1, -hw, +hw};
        plan.scale = 1.0f / 6.0f;
      } else {
        plan.offsets = {-1, -w, +w, +1, +w, +1};
        plan.scale = 0.25f;
      }
      break;
    case KernelKind::diffusion3d:
      plan.offsets = {-1, -w, -hw, 0, +w, +1};
      plan.coeffs = k.coeffs;
      break;
  }
  return plan;
}

}  // namespace

IpStreamResult ip_process_stream(const StencilKernel& kernel,
                                 const Dims& dims,
                                 std::span<const StreamBeat> in_beats) {
  kernel.validate();
  Grid probe;  // shape check only
  probe.dims = dims;
  probe.data.resize(dims.cells());
  kernel.validate_against(probe);

  const std::size_t cells = dims.cells();
  const std::size_t nbeats = (cells + kPeCount - 1) / kPeCount;
  if (in_beats.size() != nbeats)
    throw SimError("stream has " + std::to_string(in_beats.size()) +
                   " beats, grid " + dims.str() + " needs " +
                   std::to_string(nbeats));
  for (std::size_t b = 0; b < nbeats; ++b)
    if (in_beats[b].last != (b + 1 == nbeats))
      throw SimError(b + 1 == nbeats ? "stream missing last-beat marker"
                                     : "early last-beat marker in stream");

  const TapPlan plan = make_tap_plan(kernel, dims);
  const uint64_t span = ip_fill_cells(kernel, dims);
  // Newest span cells, ring-addressed by absolute cell index mod span.
  std::vector<float> window(span, 0.0f);
  // Output lags input far enough that the newest tap of any center has
  // always been shifted in.
  const std::size_t skew = dims.row_stride() + 1 +
                           (dims.rank == 3 ? dims.plane_stride() : 0);
  const std::size_t hw = dims.plane_stride();
  const std::size_t w = dims.row_stride();

  IpStreamResult res;
  res.beats.resize(nbeats);
  res.fill_cycles = (span + kPeCount - 1) / kPeCount;
  res.total_cycles = res.fill_cycles + nbeats;

  auto emit = [&](std::size_t m) {
    const std::size_t k = m / hw;
    const std::size_t i = (m % hw) / w;
    const std::size_t j = m % w;
    bool boundary = i == 0 || i + 1 == dims.h || j == 0 || j + 1 == dims.w;
    if (dims.rank == 3 && (k == 0 || k + 1 == dims.d)) boundary = true;
    float v;
    if (boundary) {
      v = window[m % span];
    } else {
      auto tap = [&](std::size_t n) {
        const std::size_t idx =
            static_cast<std::size_t>(static_cast<std::ptrdiff_t>(m) +
                                     plan.offsets[n]);
        return window[idx % span];
      };
      if (plan.coeffs.empty()) {
        float acc = tap(0);
        for (std::size_t n = 1; n < plan.offsets.size(); ++n)
          acc = acc + tap(n);
        v = plan.scale * acc;
      } else {
        float acc = plan.coeffs[0] * tap(0);
        for (std::size_t n = 1; n < plan.offsets.size(); ++n)
          acc = acc + plan.coeffs[n] * tap(n);
        v = acc;
      }
    }
    res.beats[m / kPeCount].cells[m % kPeCount] = v;
  };

  for (std::size_t n = 0; n < cells; ++n) {
    window[n % span] = in_beats[n / kPeCount].cells[n % kPeCount];
    if (n >= skew) emit(n - skew);
  }
  // Drain: every remaining center already has its taps buffered.
  for (std::size_t m = cells > skew ? cells - skew : 0; m < cells; ++m)
    emit(m);

  res.beats.back().last = true;
  return res;
}

}  // namespace fabric
