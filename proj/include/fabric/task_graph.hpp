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
#include <map>
#include <string>
#include <vector>

#include "fabric/grid.hpp"
#include "fabric/stencil.hpp"

namespace fabric {

using TaskId = uint32_t;

/// A depend-clause list item. Matching is by exact symbol; distinct
/// symbols never alias.
struct DepVar {
  std::string symbol;
  bool operator==(const DepVar&) const = default;
  auto operator<=>(const DepVar&) const = default;
};

enum class MapDir { to, from, tofrom };

const char* map_dir_name(MapDir dir);

/// One map-clause entry: which host buffer moves, which way, how many bytes.
struct MapEntry {
  std::string buffer;
  MapDir dir = MapDir::tofrom;
  uint64_t bytes = 0;
};

/// Kernel arguments captured at task creation.
struct TaskArgs {
  std::string buffer;   // grid operand
  Dims dims;
  std::vector<float> coeffs;
};

struct TaskNode {
  TaskId id = 0;              // equals creation order
  std::string kernel_ref;     // base function name, resolved at finalize
  TaskArgs args;
  std::vector<DepVar> deps_in;
  std::vector<DepVar> deps_out;
  std::vector<MapEntry> maps;
  bool nowait = true;
};

/// Why the producer must run before the consumer. `sync` marks the
/// serialization a blocking (non-nowait) task imposes on its successors;
/// the other causes follow list-item out-serialization rules.
enum class EdgeCause { raw, waw, war, sync };

const char* edge_cause_name(EdgeCause cause);

struct Edge {
  TaskId producer = 0;
  TaskId consumer = 0;
  EdgeCause cause = EdgeCause::raw;
  bool operator==(const Edge&) const = default;
};

/// Immutable dependence DAG over the created tasks. Edges always point
/// from lower to higher id, so creation order is a topological order.
struct TaskGraph {
  std::vector<TaskNode> nodes;
  std::vector<Edge> edges;

  std::vector<Edge> in_edges(TaskId id) const;
  std::vector<Edge> out_edges(TaskId id) const;

  /// Test/deserialization escape hatch; does not validate.
  static TaskGraph from_parts(std::vector<TaskNode> nodes,
                              std::vector<Edge> edges);
};

/// Throws PlanError if any edge points backward or the edge set has a
/// cycle. Graphs produced by GraphBuilder always pass.
void validate_acyclic(const TaskGraph& graph);

/// Records tasks as the control thread creates them; nothing is dispatched
/// until the enclosing region reaches its synchronization point, at which
/// point the whole graph is frozen at once.
class GraphBuilder {
 public:
  TaskId task_create(std::string kernel_ref, TaskArgs args,
                     std::vector<DepVar> deps_in,
                     std::vector<DepVar> deps_out,
                     std::vector<MapEntry> maps, bool nowait = true);

  /// Freezes the graph. The builder cannot be reused afterwards.
  TaskGraph finalize_at_sync();

  bool building() const { return building_; }

 private:
  void add_edge(TaskId producer, TaskId consumer, EdgeCause cause);

  struct VarState {
    bool has_writer = false;
    TaskId last_writer = 0;
    std::vector<TaskId> readers_since_write;
  };

  bool building_ = true;
  std::vector<TaskNode> nodes_;
  std::vector<Edge> edges_;
  std::map<DepVar, VarState> vars_;
  bool has_blocking_ = false;
  TaskId last_blocking_ = 0;
};

/// Synthesizes the canonical offload pattern: N chained tasks over one
/// grid buffer, task i consuming sentinel deps[i] and producing deps[i+1],
/// each mapping the buffer tofrom.
TaskGraph build_pipeline_graph(const StencilKernel& kernel,
                               const std::string& buffer, const Dims& dims,
                               uint32_t iterations,
                               const std::string& kernel_ref);

/// Stable JSON rendering (sorted keys) used by --dump-graph and golden
/// tests.
std::string graph_to_json(const TaskGraph& graph);

}  // namespace fabric
