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

#include <cstdio>

#include "fabric/error.hpp"
#include "fabric/grid.hpp"
#include "fabric/stencil.hpp"
#include "testutil.hpp"

using namespace fabric;
using testutil::constant_grid;
using testutil::impulse_grid;
using testutil::random_grid;

TEST_CASE("laplace2d fixed point on all-ones grid") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = constant_grid({2, 4, 4, 1}, 1.0f);
  Grid out = apply_stencil(k, g);
  CHECK(bitwise_equal(out, g));
}

TEST_CASE("laplace2d impulse spreads by hand-computed values") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = Grid::zeros({2, 5, 5, 1});
  g.at(2, 2) = 4.0f;
  Grid out = apply_stencil(k, g);
  CHECK(out.at(1, 2) == 1.0f);
  CHECK(out.at(2, 1) == 1.0f);
  CHECK(out.at(3, 2) == 1.0f);
  CHECK(out.at(2, 3) == 1.0f);
  CHECK(out.at(2, 2) == 0.0f);
  CHECK(out.at(0, 0) == 0.0f);
}

TEST_CASE("diffusion2d constant grid is a fixed point when coeffs sum to 1") {
  StencilKernel k{KernelKind::diffusion2d, {0.2f, 0.2f, 0.2f, 0.2f, 0.2f}};
  Grid g = constant_grid({2, 6, 5, 1}, 3.5f);
  Grid out = apply_stencil(k, g);
  for (uint32_t i = 1; i + 1 < 6; ++i)
    for (uint32_t j = 1; j + 1 < 5; ++j)
      CHECK(out.at(i, j) == doctest::Approx(3.5f).epsilon(1e-6));
}

TEST_CASE("sum-one coefficient kernels hold constant grids fixed") {
  // Power-of-two coefficient sets make the check exact in float math.
  for (KernelKind kind : {KernelKind::diffusion2d, KernelKind::jacobi9pt2d,
                          KernelKind::diffusion3d}) {
    StencilKernel k = StencilKernel::defaults(kind);
    Dims dims = kernel_rank(kind) == 2 ? Dims{2, 5, 7, 1} : Dims{3, 4, 4, 5};
    Grid g = constant_grid(dims, 2.75f);
    CHECK(bitwise_equal(apply_stencil(k, g), g));
  }
  StencilKernel six{KernelKind::laplace3d, {}, true};
  Grid g3 = constant_grid({3, 4, 4, 4}, 1.0f);
  CHECK(bitwise_equal(apply_stencil(six, g3), g3));
}

TEST_CASE("every kernel matches the independent reference evaluator") {
  for (KernelKind kind : all_kernel_kinds()) {
    StencilKernel k = StencilKernel::defaults(kind);
    Dims dims = kernel_rank(kind) == 2 ? Dims{2, 13, 9, 1} : Dims{3, 7, 6, 5};
    Grid g = random_grid(dims, 0x5eed0 + static_cast<int>(kind));
    CHECK(bitwise_equal(apply_stencil(k, g), testutil::reference_apply(k, g)));
  }
}

TEST_CASE("laplace3d keeps its repeated taps unless six-point is selected") {
  Grid g = random_grid({3, 5, 5, 5}, 42);
  StencilKernel verbatim{KernelKind::laplace3d, {}};
  StencilKernel six{KernelKind::laplace3d, {}, true};
  Grid a = apply_stencil(verbatim, g);
  Grid b = apply_stencil(six, g);
  CHECK(!bitwise_equal(a, b));
  CHECK(bitwise_equal(a, testutil::reference_apply(verbatim, g)));
  CHECK(bitwise_equal(b, testutil::reference_apply(six, g)));
  // Verbatim form never reads the k-axis: on a plane-constant grid each
  // plane updates from its own value alone (six taps at 0.25 -> 1.5x).
  Grid planes = Grid::zeros({3, 5, 5, 5});
  for (uint32_t kk = 0; kk < 5; ++kk)
    for (uint32_t i = 0; i < 5; ++i)
      for (uint32_t j = 0; j < 5; ++j) planes.at(i, j, kk) = float(kk);
  Grid out = apply_stencil(verbatim, planes);
  for (uint32_t kk = 1; kk < 4; ++kk)
    CHECK(out.at(2, 2, kk) == 1.5f * float(kk));
}

TEST_CASE("boundary cells are preserved for every kernel") {
  for (KernelKind kind : all_kernel_kinds()) {
    StencilKernel k = StencilKernel::defaults(kind);
    Dims dims = kernel_rank(kind) == 2 ? Dims{2, 8, 11, 1} : Dims{3, 5, 4, 6};
    Grid g = random_grid(dims, 7000 + static_cast<int>(kind));
    Grid out = apply_stencil(k, g);
    for (uint32_t kk = 0; kk < dims.d; ++kk)
      for (uint32_t i = 0; i < dims.h; ++i)
        for (uint32_t j = 0; j < dims.w; ++j)
          if (g.boundary(i, j, kk))
            CHECK(out.at(i, j, kk) == g.at(i, j, kk));
  }
}

TEST_CASE("linearity under power-of-two scaling") {
  for (KernelKind kind : all_kernel_kinds()) {
    StencilKernel k = StencilKernel::defaults(kind);
    Dims dims = kernel_rank(kind) == 2 ? Dims{2, 9, 9, 1} : Dims{3, 5, 5, 5};
    Grid g = random_grid(dims, 90 + static_cast<int>(kind));
    Grid scaled = g;
    for (float& v : scaled.data) v *= 8.0f;
    Grid a = apply_stencil(k, scaled);
    Grid b = apply_stencil(k, g);
    for (float& v : b.data) v *= 8.0f;
    CHECK(bitwise_equal(a, b));
  }
}

TEST_CASE("run_iterations composes and t=0 is the identity") {
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g = impulse_grid({2, 5, 5, 1});
  CHECK(bitwise_equal(run_iterations(k, g, 0), g));
  Grid two = run_iterations(k, g, 2);
  CHECK(bitwise_equal(two, apply_stencil(k, apply_stencil(k, g))));
  Grid ones = constant_grid({2, 6, 6, 1}, 1.0f);
  CHECK(bitwise_equal(run_iterations(k, ones, 240), ones));
}

TEST_CASE("determinism: same input, same bits") {
  StencilKernel k = StencilKernel::defaults(KernelKind::jacobi9pt2d);
  Grid g = random_grid({2, 17, 23, 1}, 123);
  CHECK(bitwise_equal(apply_stencil(k, g), apply_stencil(k, g)));
}

TEST_CASE("flops per cell counts the written formulas") {
  CHECK(flops_per_cell(StencilKernel::defaults(KernelKind::laplace2d)) == 4);
  CHECK(flops_per_cell(StencilKernel::defaults(KernelKind::diffusion2d)) == 9);
  CHECK(flops_per_cell(StencilKernel::defaults(KernelKind::jacobi9pt2d)) == 17);
  CHECK(flops_per_cell(StencilKernel::defaults(KernelKind::laplace3d)) == 6);
  CHECK(flops_per_cell(StencilKernel::defaults(KernelKind::diffusion3d)) == 11);
}

TEST_CASE("kernel and grid validation errors") {
  StencilKernel lap = StencilKernel::defaults(KernelKind::laplace2d);
  Grid g3 = Grid::zeros({3, 4, 4, 4});
  CHECK_THROWS_AS(apply_stencil(lap, g3), ConfigError);  // rank mismatch
  CHECK_THROWS_AS(Grid::zeros({2, 2, 5, 1}), ConfigError);  // dim < 3
  StencilKernel bad{KernelKind::diffusion2d, {0.2f, 0.2f}};
  CHECK_THROWS_AS(apply_stencil(bad, Grid::zeros({2, 4, 4, 1})), ConfigError);
}

TEST_CASE("grid binary round-trip and csv") {
  Grid g = random_grid({3, 4, 5, 3}, 9);
  std::string path = "test_grid_roundtrip.grd";
  save_grid(g, path);
  Grid back = load_grid(path);
  CHECK(bitwise_equal(g, back));
  std::remove(path.c_str());

  Grid small = impulse_grid({2, 3, 3, 1}, 2.0f);
  std::string csv = grid_csv(small);
  CHECK(csv == "0,0,0\n0,2,0\n0,0,0\n");
}
