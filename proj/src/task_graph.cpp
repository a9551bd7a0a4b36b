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

#include "fabric/task_graph.hpp"

#include <algorithm>
#include <queue>

#include "json.hpp"

#include "fabric/error.hpp"

namespace fabric {

const char* map_dir_name(MapDir dir) {
  switch (dir) {
    case MapDir::to: return "to";
    case MapDir::from: return "from";
    case MapDir::tofrom: return "tofrom";
  }
  return "?";
}

const char* edge_cause_name(EdgeCause cause) {
  switch (cause) {
    case EdgeCause::raw: return "raw";
    case EdgeCause::waw: return "waw";
    case EdgeCause::war: return "war";
    case EdgeCause::sync: return "sync";
  }
  return "?";
}

namespace {
int cause_rank(EdgeCause c) {
  switch (c) {
    case EdgeCause::raw: return 3;
    case EdgeCause::waw: return 2;
    case EdgeCause::war: return 1;
    case EdgeCause::sync: return 0;
  }
  return 0;
}
}  // namespace

std::vector<Edge> TaskGraph::in_edges(TaskId id) const {
  std::vector<Edge> out;
  for (const Edge& e : edges)
    if (e.consumer == id) out.push_back(e);
  return out;
}

std::vector<Edge> TaskGraph::out_edges(TaskId id) const {
  std::vector<Edge> out;
  for (const Edge& e : edges)
    if (e.producer == id) out.push_back(e);
  return out;
}

TaskGraph TaskGraph::from_parts(std::vector<TaskNode> nodes,
                                std::vector<Edge> edges) {
  TaskGraph g;
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);
  return g;
}

void validate_acyclic(const TaskGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : graph.edges) {
    if (e.producer >= n || e.consumer >= n)
      throw PlanError("edge references unknown task id");
    indegree[e.consumer]++;
  }
  // Kahn's algorithm; catches cycles in hand-built graphs even when ids
  // happen to be ordered.
  std::queue<TaskId> ready;
  for (TaskId i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    TaskId t = ready.front();
    ready.pop();
    ++seen;
    for (const Edge& e : graph.edges)
      if (e.producer == t && --indegree[e.consumer] == 0)
        ready.push(e.consumer);
  }
  if (seen != n) throw PlanError("task graph has a cycle");
  for (const Edge& e : graph.edges)
    if (e.producer >= e.consumer)
      throw PlanError("edge points backward in creation order: " +
                      std::to_string(e.producer) + "->" +
                      std::to_string(e.consumer));
}

void GraphBuilder::add_edge(TaskId producer, TaskId consumer,
                            EdgeCause cause) {
  if (producer == consumer) return;
  for (Edge& e : edges_) {
    if (e.producer == producer && e.consumer == consumer) {
      if (cause_rank(cause) > cause_rank(e.cause)) e.cause = cause;
      return;
    }
  }
  edges_.push_back({producer, consumer, cause});
}

TaskId GraphBuilder::task_create(std::string kernel_ref, TaskArgs args,
                                 std::vector<DepVar> deps_in,
                                 std::vector<DepVar> deps_out,
                                 std::vector<MapEntry> maps, bool nowait) {
  if (!building_) throw PlanError("task_create after finalize");
  if (kernel_ref.empty()) throw PlanError("empty kernel_ref");
  for (const MapEntry& m : maps)
    if (m.bytes == 0 || m.buffer.empty())
      throw PlanError("map entry needs a buffer and a positive length");

  const TaskId id = static_cast<TaskId>(nodes_.size());

  // A blocking task serializes everything created after it.
  if (has_blocking_) add_edge(last_blocking_, id, EdgeCause::sync);

  for (const DepVar& v : deps_in) {
    const VarState& st = vars_[v];
    if (st.has_writer) add_edge(st.last_writer, id, EdgeCause::raw);
  }
  for (const DepVar& v : deps_out) {
    const VarState& st = vars_[v];
    bool any_reader = false;
    for (TaskId r : st.readers_since_write) {
      if (r == id) continue;
      add_edge(r, id, EdgeCause::war);
      any_reader = true;
    }
    if (!any_reader && st.has_writer)
      add_edge(st.last_writer, id, EdgeCause::waw);
  }
  for (const DepVar& v : deps_in) vars_[v].readers_since_write.push_back(id);
  for (const DepVar& v : deps_out) {
    VarState& st = vars_[v];
    st.has_writer = true;
    st.last_writer = id;
    st.readers_since_write.clear();
  }

  if (!nowait) {
    has_blocking_ = true;
    last_blocking_ = id;
  }

  TaskNode node;
  node.id = id;
  node.kernel_ref = std::move(kernel_ref);
  node.args = std::move(args);
  node.deps_in = std::move(deps_in);
  node.deps_out = std::move(deps_out);
  node.maps = std::move(maps);
  node.nowait = nowait;
  nodes_.push_back(std::move(node));
  return id;
}

TaskGraph GraphBuilder::finalize_at_sync() {
  if (!building_) throw PlanError("graph already finalized");
  building_ = false;
  TaskGraph g;
  g.nodes = std::move(nodes_);
  g.edges = std::move(edges_);
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return a.producer != b.producer ? a.producer < b.producer
                                    : a.consumer < b.consumer;
  });
  validate_acyclic(g);
  return g;
}

TaskGraph build_pipeline_graph(const StencilKernel& kernel,
                               const std::string& buffer, const Dims& dims,
                               uint32_t iterations,
                               const std::string& kernel_ref) {
  kernel.validate();
  GraphBuilder b;
  const uint64_t bytes = dims.cells() * sizeof(float);
  for (uint32_t i = 0; i < iterations; ++i) {
    b.task_create(kernel_ref, TaskArgs{buffer, dims, kernel.coeffs},
                  {DepVar{"deps[" + std::to_string(i) + "]"}},
                  {DepVar{"deps[" + std::to_string(i + 1) + "]"}},
                  {MapEntry{buffer, MapDir::tofrom, bytes}},
                  /*nowait=*/true);
  }
  return b.finalize_at_sync();
}

std::string graph_to_json(const TaskGraph& graph) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const TaskNode& n : graph.nodes) {
    nlohmann::json nd;
    nd["id"] = n.id;
    nd["kernel"] = n.kernel_ref;
    nd["buffer"] = n.args.buffer;
    nd["nowait"] = n.nowait;
    nd["deps_in"] = nlohmann::json::array();
    for (const DepVar& v : n.deps_in) nd["deps_in"].push_back(v.symbol);
    nd["deps_out"] = nlohmann::json::array();
    for (const DepVar& v : n.deps_out) nd["deps_out"].push_back(v.symbol);
    nd["maps"] = nlohmann::json::array();
    for (const MapEntry& m : n.maps)
      nd["maps"].push_back({{"buffer", m.buffer},
                            {"dir", map_dir_name(m.dir)},
                            {"bytes", m.bytes}});
    j["nodes"].push_back(nd);
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : graph.edges)
    j["edges"].push_back({{"from", e.producer},
                          {"to", e.consumer},
                          {"cause", edge_cause_name(e.cause)}});
  return j.dump(2) + "\n";
}

}  // namespace fabric
