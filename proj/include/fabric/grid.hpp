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

namespace fabric {

/// Shape of a 2-D or 3-D grid of float32 cells.
/// Rows are indexed i in [0,h), columns j in [0,w), planes k in [0,d).
/// d is 1 for rank-2 grids.
struct Dims {
  uint32_t rank = 2;
  uint32_t h = 0;
  uint32_t w = 0;
  uint32_t d = 1;

  std::size_t cells() const {
    return static_cast<std::size_t>(h) * w * d;
  }
  /// Cells with a full stencil window in every axis: prod(dim - 2).
  std::size_t interior_cells() const;
  std::size_t plane_stride() const {
    return static_cast<std::size_t>(h) * w;
  }
  std::size_t row_stride() const { return w; }

  bool operator==(const Dims&) const = default;
  std::string str() const;
};

/// Dense grid of 32-bit floats, plane-major then row-major.
struct Grid {
  Dims dims;
  std::vector<float> data;

  static Grid zeros(Dims dims);

  std::size_t index(uint32_t i, uint32_t j, uint32_t k = 0) const {
    return (static_cast<std::size_t>(k) * dims.h + i) * dims.w + j;
  }
  float at(uint32_t i, uint32_t j, uint32_t k = 0) const {
    return data[index(i, j, k)];
  }
  float& at(uint32_t i, uint32_t j, uint32_t k = 0) {
    return data[index(i, j, k)];
  }

  bool boundary(uint32_t i, uint32_t j, uint32_t k = 0) const {
    if (i == 0 || i + 1 == dims.h || j == 0 || j + 1 == dims.w) return true;
    return dims.rank == 3 && (k == 0 || k + 1 == dims.d);
  }

  /// Throws ConfigError unless rank is 2/3, every used dim >= 3, and the
  /// data length matches the shape.
  void validate() const;
};

/// Exact bit-pattern comparison (distinguishes -0.0f, compares NaN bits).
bool bitwise_equal(const Grid& a, const Grid& b);

/// Binary grid file: magic "GRD1", then rank/h/w/d as little-endian u32,
/// then the cells as little-endian float32.
Grid load_grid(const std::string& path);
void save_grid(const Grid& grid, const std::string& path);

/// One text row per grid row; rank-3 grids emit planes top to bottom.
std::string grid_csv(const Grid& grid);

}  // namespace fabric
