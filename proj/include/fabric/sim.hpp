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

#include "fabric/cluster.hpp"
#include "fabric/grid.hpp"
#include "fabric/placement.hpp"
#include "fabric/task_graph.hpp"

namespace fabric {

struct SimParams {
  uint32_t hop_latency_cycles = 4;
  uint32_t max_payload_bytes = 1500;
  uint64_t vfifo_bytes_per_sec = 6'400'000'000ull;  // DDR cap
  bool laplace3d_six_point = false;
  bool record_trace = false;
};

/// Point-to-point link description for standalone transfer estimates.
struct LinkModel {
  double bytes_per_sec = 0;
  double frame_overhead_bytes = 0;
  double max_payload_bytes = 0;  // 0 means a single frame
  double latency_s = 0;
};

/// latency + (bytes + frames * overhead) / bandwidth.
double transfer_time(uint64_t bytes, const LinkModel& link);

struct TraceEvent {
  double time_s = 0;
  std::string component;
  std::string event;
  uint64_t bytes = 0;
};

struct SimResult {
  std::map<std::string, Grid> buffers;  // egress contents per buffer
  double elapsed_s = 0;                 // host-to-host
  double fabric_active_s = 0;           // first to last beat inside boards
  std::map<std::string, double> busy_s;
  uint64_t frames_total = 0;
  std::map<std::string, uint64_t> link_bytes;
  uint32_t host_transfers = 0;
  std::vector<TraceEvent> trace;
};

/// Deterministic event-driven execution of a planned task graph. Streams
/// flow beat-by-beat in accounting terms: a downstream IP starts on the
/// first beats of its producer, so chained IPs overlap. Waves reprogram the
/// fabric; a wave opens once every transfer of the previous one has
/// drained.
SimResult simulate(const TaskGraph& graph, const Placement& placement,
                   const RouteTable& routes,
                   const std::vector<ConfWrite>& conf_writes,
                   const std::map<std::string, Grid>& host_buffers,
                   const ClusterDesc& cluster, const SimParams& params = {});

std::string trace_csv(const std::vector<TraceEvent>& trace);
std::string sim_summary_json(const SimResult& result);

}  // namespace fabric
