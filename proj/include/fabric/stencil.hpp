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

namespace fabric {

enum class KernelKind {
  laplace2d,
  diffusion2d,
  jacobi9pt2d,
  laplace3d,
  diffusion3d,
};

const char* kernel_name(KernelKind kind);
KernelKind kernel_from_name(const std::string& name);
uint32_t kernel_rank(KernelKind kind);
std::size_t kernel_coeff_count(KernelKind kind);
const std::vector<KernelKind>& all_kernel_kinds();

/// One stencil update rule: the kind selects the fixed tap pattern, the
/// coefficients are the per-tap constants streamed into the hardware IP.
/// Laplace kernels carry no coefficients (their scale factor is intrinsic).
struct StencilKernel {
  KernelKind kind;
  std::vector<float> coeffs;
  /// The 3-D Laplace tap list repeats two of its south/east neighbors.
  /// Default keeps that form; the alternative uses the six distinct
  /// neighbors with a 1/6 scale.
  bool laplace3d_six_point = false;

  /// Kernel with the stock coefficient set (exact binary fractions that
  /// sum to 1, so constant grids are fixed points).
  static StencilKernel defaults(KernelKind kind);

  void validate() const;
  void validate_against(const Grid& grid) const;
};

/// Jacobi-style update: reads the input grid, writes a fresh grid.
/// Interior cells get the kernel formula with additions associated left to
/// right in tap order; boundary cells are copied unchanged.
Grid apply_stencil(const StencilKernel& kernel, const Grid& grid);

/// t-fold composition of apply_stencil; t = 0 returns the input unchanged.
Grid run_iterations(const StencilKernel& kernel, Grid grid, uint32_t t);

/// Adds plus multiplies in one interior cell update, counting the tap
/// formula exactly as written.
uint32_t flops_per_cell(const StencilKernel& kernel);

}  // namespace fabric
