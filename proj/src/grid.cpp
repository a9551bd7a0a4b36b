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

#include "fabric/grid.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "fabric/error.hpp"

namespace fabric {

namespace {
constexpr char kMagic[4] = {'G', 'R', 'D', '1'};
}

std::size_t Dims::interior_cells() const {
  std::size_t n = static_cast<std::size_t>(h - 2) * (w - 2);
  if (rank == 3) n *= (d - 2);
  return n;
}

std::string Dims::str() const {
  std::string s = std::to_string(h) + "x" + std::to_string(w);
  if (rank == 3) s += "x" + std::to_string(d);
  return s;
}

Grid Grid::zeros(Dims dims) {
  Grid g;
  g.dims = dims;
  g.data.assign(dims.cells(), 0.0f);
  g.validate();
  return g;
}

void Grid::validate() const {
  if (dims.rank != 2 && dims.rank != 3)
    throw ConfigError("grid rank must be 2 or 3, got " +
                      std::to_string(dims.rank));
  if (dims.rank == 2 && dims.d != 1)
    throw ConfigError("rank-2 grid must have depth 1");
  uint32_t min_d = dims.rank == 3 ? dims.d : 3;
  if (dims.h < 3 || dims.w < 3 || min_d < 3)
    throw ConfigError("grid dims must be >= 3 in every axis, got " +
                      dims.str());
  if (data.size() != dims.cells())
    throw ConfigError("grid data length " + std::to_string(data.size()) +
                      " does not match dims " + dims.str());
}

bool bitwise_equal(const Grid& a, const Grid& b) {
  if (!(a.dims == b.dims)) return false;
  return std::memcmp(a.data.data(), b.data.data(),
                     a.data.size() * sizeof(float)) == 0;
}

Grid load_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open grid file: " + path);
  char magic[4];
  uint32_t hdr[4];
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("bad grid file header: " + path);
  Grid g;
  g.dims = Dims{hdr[0], hdr[1], hdr[2], hdr[3]};
  if (g.dims.rank != 2 && g.dims.rank != 3)
    throw ConfigError("bad grid rank in " + path);
  g.data.resize(g.dims.cells());
  f.read(reinterpret_cast<char*>(g.data.data()),
         static_cast<std::streamsize>(g.data.size() * sizeof(float)));
  if (!f) throw ConfigError("truncated grid file: " + path);
  g.validate();
  return g;
}

void save_grid(const Grid& grid, const std::string& path) {
  grid.validate();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write grid file: " + path);
  uint32_t hdr[4] = {grid.dims.rank, grid.dims.h, grid.dims.w, grid.dims.d};
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  f.write(reinterpret_cast<const char*>(grid.data.data()),
          static_cast<std::streamsize>(grid.data.size() * sizeof(float)));
  if (!f) throw ConfigError("write failed: " + path);
}

std::string grid_csv(const Grid& grid) {
  std::string out;
  char buf[48];
  for (uint32_t k = 0; k < grid.dims.d; ++k) {
    for (uint32_t i = 0; i < grid.dims.h; ++i) {
      for (uint32_t j = 0; j < grid.dims.w; ++j) {
        std::snprintf(buf, sizeof(buf), "%.9g", grid.at(i, j, k));
        if (j) out += ',';
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace fabric
