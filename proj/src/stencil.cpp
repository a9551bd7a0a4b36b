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

#include "fabric/stencil.hpp"

#include <utility>

#include "fabric/error.hpp"

namespace fabric {

const char* kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::laplace2d: return "laplace2d";
    case KernelKind::diffusion2d: return "diffusion2d";
    case KernelKind::jacobi9pt2d: return "jacobi9pt2d";
    case KernelKind::laplace3d: return "laplace3d";
    case KernelKind::diffusion3d: return "diffusion3d";
  }
  return "?";
}

KernelKind kernel_from_name(const std::string& name) {
  for (KernelKind k : all_kernel_kinds())
    if (name == kernel_name(k)) return k;
  throw ConfigError("unknown kernel kind: " + name);
}

uint32_t kernel_rank(KernelKind kind) {
  switch (kind) {
    case KernelKind::laplace3d:
    case KernelKind::diffusion3d: return 3;
    default: return 2;
  }
}

std::size_t kernel_coeff_count(KernelKind kind) {
  switch (kind) {
    case KernelKind::laplace2d: return 0;
    case KernelKind::diffusion2d: return 5;
    case KernelKind::jacobi9pt2d: return 9;
    case KernelKind::laplace3d: return 0;
    case KernelKind::diffusion3d: return 6;
  }
  return 0;
}

const std::vector<KernelKind>& all_kernel_kinds() {
  static const std::vector<KernelKind> kinds = {
      KernelKind::laplace2d, KernelKind::diffusion2d, KernelKind::jacobi9pt2d,
      KernelKind::laplace3d, KernelKind::diffusion3d};
  return kinds;
}

StencilKernel StencilKernel::defaults(KernelKind kind) {
  switch (kind) {
    case KernelKind::diffusion2d:
      return {kind, {0.125f, 0.125f, 0.5f, 0.125f, 0.125f}};
    case KernelKind::jacobi9pt2d:
      return {kind,
              {0.0625f, 0.125f, 0.0625f, 0.125f, 0.25f, 0.125f, 0.0625f,
               0.125f, 0.0625f}};
    case KernelKind::diffusion3d:
      return {kind, {0.125f, 0.125f, 0.125f, 0.375f, 0.125f, 0.125f}};
    default:
      return {kind, {}};
  }
}

void StencilKernel::validate() const {
  if (coeffs.size() != kernel_coeff_count(kind))
    throw ConfigError(std::string("kernel ") + kernel_name(kind) +
                      " expects " +
                      std::to_string(kernel_coeff_count(kind)) +
                      " coefficients, got " + std::to_string(coeffs.size()));
}

void StencilKernel::validate_against(const Grid& grid) const {
  validate();
  grid.validate();
  if (kernel_rank(kind) != grid.dims.rank)
    throw ConfigError(std::string("kernel ") + kernel_name(kind) +
                      " is rank-" + std::to_string(kernel_rank(kind)) +
                      " but grid is rank-" + std::to_string(grid.dims.rank));
}

namespace {

void update_interior_2d(const StencilKernel& k, const Grid& in, Grid& out) {
  const auto& c = k.coeffs;
  const uint32_t h = in.dims.h, w = in.dims.w;
  for (uint32_t i = 1; i + 1 < h; ++i) {
    for (uint32_t j = 1; j + 1 < w; ++j) {
      float v = 0.0f;
      switch (k.kind) {
        case KernelKind::laplace2d:
          v = 0.25f * (in.at(i, j - 1) + in.at(i - 1, j) + in.at(i + 1, j) +
                       in.at(i, j + 1));
          break;
        case KernelKind::diffusion2d:
          v = c[0] * in.at(i, j - 1) + c[1] * in.at(i - 1, j) +
              c[2] * in.at(i, j) + c[3] * in.at(i + 1, j) +
              c[4] * in.at(i, j + 1);
          break;
        case KernelKind::jacobi9pt2d:
          v = c[0] * in.at(i - 1, j - 1) + c[1] * in.at(i, j - 1) +
              c[2] * in.at(i + 1, j - 1) + c[3] * in.at(i - 1, j) +
              c[4] * in.at(i, j) + c[5] * in.at(i + 1, j) +
              c[6] * in.at(i - 1, j + 1) + c[7] * in.at(i, j + 1) +
              c[8] * in.at(i + 1, j + 1);
          break;
        default: break;
      }
      out.at(i, j) = v;
    }
  }
}

void update_interior_3d(const StencilKernel& k, const Grid& in, Grid& out) {
  const auto& c = k.coeffs;
  const uint32_t h = in.dims.h, w = in.dims.w, d = in.dims.d;
  for (uint32_t kk = 1; kk + 1 < d; ++kk) {
    for (uint32_t i = 1; i + 1 < h; ++i) {
      for (uint32_t j = 1; j + 1 < w; ++j) {
        float v = 0.0f;
        switch (k.kind) {
          case KernelKind::laplace3d:
            if (k.laplace3d_six_point) {
              v = (1.0f / 6.0f) *
                  (in.at(i, j - 1, kk) + in.at(i - 1, j, kk) +
                   in.at(i + 1, j, kk) + in.at(i, j + 1, kk) +
                   in.at(i, j, kk - 1) + in.at(i, j, kk + 1));
            } else {
              // The stock tap list repeats the i+1 and j+1 neighbors.
              v = 0.25f * (in.at(i, j - 1, kk) + in.at(i - 1, j, kk) +
                           in.at(i + 1, j, kk) + in.at(i, j + 1, kk) +
                           in.at(i + 1, j, kk) + in.at(i, j + 1, kk));
            }
            break;
          case KernelKind::diffusion3d:
            v = c[0] * in.at(i, j - 1, kk) + c[1] * in.at(i - 1, j, kk) +
                c[2] * in.at(i, j, kk - 1) + c[3] * in.at(i, j, kk) +
                c[4] * in.at(i + 1, j, kk) + c[5] * in.at(i, j + 1, kk);
            break;
          default: break;
        }
        out.at(i, j, kk) = v;
      }
    }
  }
}

}  // namespace

Grid apply_stencil(const StencilKernel& kernel, const Grid& grid) {
  kernel.validate_against(grid);
  Grid out = grid;  // boundary cells keep their input values
  if (grid.dims.rank == 2)
    update_interior_2d(kernel, grid, out);
  else
    update_interior_3d(kernel, grid, out);
  return out;
}

Grid run_iterations(const StencilKernel& kernel, Grid grid, uint32_t t) {
  kernel.validate_against(grid);
  for (uint32_t n = 0; n < t; ++n) grid = apply_stencil(kernel, grid);
  return grid;
}

uint32_t flops_per_cell(const StencilKernel& kernel) {
  switch (kernel.kind) {
    case KernelKind::laplace2d: return 4;    // 3 adds + 1 mul
    case KernelKind::diffusion2d: return 9;  // 4 adds + 5 muls
    case KernelKind::jacobi9pt2d: return 17; // 8 adds + 9 muls
    case KernelKind::laplace3d: return 6;    // 5 adds + 1 mul
    case KernelKind::diffusion3d: return 11; // 5 adds + 6 muls
  }
  return 0;
}

}  // namespace fabric
