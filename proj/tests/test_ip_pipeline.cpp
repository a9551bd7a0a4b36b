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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fabric/error.hpp"
#include "fabric/ip_pipeline.hpp"
#include "testutil.hpp"

using namespace fabric;
using testutil::constant_grid;
using testutil::random_grid;

TEST_CASE("beat packing round-trips and pads the tail") {
  Grid g = random_grid({2, 5, 5, 1}, 5);  // 25 cells -> 4 beats
  auto beats = grid_to_beats(g);
  REQUIRE(beats.size() == 4);
  CHECK(beats.back().last);
  CHECK(!beats.front().last);
  for (int i = 1; i < 8; ++i) CHECK(beats.back().cells[i] == 0.0f);
  CHECK(bitwise_equal(beats_to_grid(beats, g.dims), g));
}

TEST_CASE("all-ones stream is a fixed point for laplace2d") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = constant_grid({2, 4, 4, 1}, 1.0f);
  IpStreamResult r = ip_process_stream(k, g.dims, grid_to_beats(g));
  CHECK(bitwise_equal(beats_to_grid(r.beats, g.dims), g));
}

TEST_CASE("impulse stream equals the functional oracle") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = testutil::impulse_grid({2, 5, 5, 1});
  IpStreamResult r = ip_process_stream(k, g.dims, grid_to_beats(g));
  CHECK(bitwise_equal(beats_to_grid(r.beats, g.dims), apply_stencil(k, g)));
}

TEST_CASE("every kernel matches apply_stencil bitwise on random grids") {
  testutil::Rng rng(0xC0FFEE);
  for (KernelKind kind : all_kernel_kinds()) {
    StencilKernel k = StencilKernel::defaults(kind);
    for (int round = 0; round < 12; ++round) {
      Dims dims;
      if (kernel_rank(kind) == 2)
        dims = {2, rng.range(3, 40), rng.range(3, 40), 1};
      else
        dims = {3, rng.range(3, 12), rng.range(3, 12), rng.range(3, 12)};
      Grid g = random_grid(dims, rng.next());
      IpStreamResult r = ip_process_stream(k, dims, grid_to_beats(g));
      CHECK(bitwise_equal(beats_to_grid(r.beats, dims), apply_stencil(k, g)));
    }
  }
}

TEST_CASE("chained streams compose like run_iterations") {
  StencilKernel k = StencilKernel::defaults(KernelKind::diffusion2d);
  Grid g = random_grid({2, 9, 17, 1}, 77);
  auto beats = grid_to_beats(g);
  for (int i = 0; i < 3; ++i) beats = ip_process_stream(k, g.dims, beats).beats;
  CHECK(bitwise_equal(beats_to_grid(beats, g.dims),
                      run_iterations(k, g, 3)));
}

TEST_CASE("fill latency follows the window span") {
  StencilKernel k2 = StencilKernel::defaults(KernelKind::laplace2d);
  Dims d2{2, 16, 16, 1};
  CHECK(ip_fill_cells(k2, d2) == 2 * 16 + 3);
  StencilKernel k3 = StencilKernel::defaults(KernelKind::diffusion3d);
  Dims d3{3, 8, 8, 8};
  CHECK(ip_fill_cells(k3, d3) == 2 * 64 + 2 * 8 + 3);

  Grid g = constant_grid(d2, 1.0f);
  IpStreamResult r = ip_process_stream(k2, d2, grid_to_beats(g));
  CHECK(r.fill_cycles == (2 * 16 + 3 + 7) / 8);
  CHECK(r.total_cycles == r.fill_cycles + (16 * 16) / 8);
}

TEST_CASE("stream validation catches malformed beat trains") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = constant_grid({2, 4, 4, 1}, 1.0f);
  auto beats = grid_to_beats(g);

  auto missing_last = beats;
  missing_last.back().last = false;
  CHECK_THROWS_AS(ip_process_stream(k, g.dims, missing_last), SimError);

  auto short_stream = beats;
  short_stream.pop_back();
  short_stream.back().last = true;
  CHECK_THROWS_AS(ip_process_stream(k, g.dims, short_stream), SimError);

  CHECK_THROWS_AS(ip_process_stream(k, Dims{2, 40, 40, 1}, beats), SimError);
}
