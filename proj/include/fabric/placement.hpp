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
#include <set>
#include <string>
#include <vector>

#include "fabric/cluster.hpp"
#include "fabric/task_graph.hpp"
#include "fabric/variant_registry.hpp"

namespace fabric {

struct Assignment {
  TaskId task = 0;
  uint32_t fpga = 0;
  uint32_t slot = 0;
  uint32_t wave = 0;
  bool operator==(const Assignment&) const = default;
};

/// Task-to-slot mapping. Slots are consumed in (fpga, slot) order starting
/// at the board closest to the host; when every slot has been used once,
/// the next wave reuses them.
struct Placement {
  std::vector<Assignment> assignments;  // indexed by task id
  uint32_t waves = 0;

  const Assignment& of(TaskId id) const { return assignments.at(id); }
};

enum class HopKind { host_dma, vfifo, switch_port, mfh, net_link };

struct Hop {
  HopKind kind = HopKind::host_dma;
  uint32_t fpga = 0;       // vfifo / switch_port / mfh
  uint32_t in_port = 0;    // switch_port
  uint32_t out_port = 0;   // switch_port
  uint32_t lane = 0;       // mfh NET lane (addressing endpoint)
  uint32_t from = 0;       // net_link source board
  uint32_t to = 0;         // net_link destination board
  uint32_t from_port = 0;  // net_link SFP ports
  uint32_t to_port = 0;
  bool operator==(const Hop&) const = default;
};

struct Route {
  std::vector<Hop> hops;
  bool operator==(const Route&) const = default;
};

/// Host-to-task or task-to-host leg of a buffer's journey.
struct HostRoute {
  std::string buffer;
  TaskId task = 0;
  Route route;
};

struct EdgeRoute {
  TaskId producer = 0;
  TaskId consumer = 0;
  std::string buffer;
  Route route;
  uint32_t producer_wave = 0;
  uint32_t consumer_wave = 0;
  bool inter_wave = false;  // data waits in the virtual FIFO between waves
};

struct RouteTable {
  std::vector<HostRoute> ingress;
  std::vector<EdgeRoute> edges;
  std::vector<HostRoute> egress;
};

// CONF register map (free address range). The switch table holds one word
// per input port; the MAC frame handler has one register set per NET
// lane (address pair and transfer length); each IP slot gets a parameter
// block.
constexpr uint32_t kConfBase = 0x9000;
constexpr uint32_t kConfSwitchBase = kConfBase + 0x000;  // + 4 * in_port
constexpr uint32_t kConfMfhBase = kConfBase + 0x100;     // + stride * lane
constexpr uint32_t kConfMfhStride = 0x20;
constexpr uint32_t kConfMfhDstHi = 0x00;  // offsets within a lane set
constexpr uint32_t kConfMfhDstLo = 0x04;
constexpr uint32_t kConfMfhSrcHi = 0x08;
constexpr uint32_t kConfMfhSrcLo = 0x0C;
constexpr uint32_t kConfMfhLen = 0x10;
constexpr uint32_t kConfIpBase = kConfBase + 0x200;  // + kConfIpStride * slot
constexpr uint32_t kConfIpStride = 0x40;
constexpr uint32_t kConfEnd = kConfBase + 0x1000;

enum class ConfMeaning {
  switch_route,
  mfh_src_mac,
  mfh_dst_mac,
  mfh_len,
  ip_coeff,
  ip_dims,
};

const char* conf_meaning_name(ConfMeaning meaning);

/// One register write. IP reuse reprograms the fabric between waves, so
/// each write carries the wave session it belongs to.
struct ConfWrite {
  uint32_t fpga = 0;
  uint32_t wave = 0;
  uint32_t offset = 0;
  uint32_t value = 0;
  ConfMeaning meaning = ConfMeaning::switch_route;
};

/// Round-robin mapping in creation order onto the free compatible slot
/// closest to the host. Tasks must resolve to hardware variants under
/// `active_ctx`.
Placement map_tasks(const TaskGraph& graph, const ClusterDesc& cluster,
                    const VariantRegistry& registry,
                    const std::set<std::string>& active_ctx = {"vc709"});

/// Streaming legs for every buffer: host ingress to the first mapper,
/// slot-to-slot legs for each dependence that carries grid data (same
/// switch when boards match, MAC-framed ring hops otherwise, the virtual
/// FIFO across wave boundaries), and egress back to the host. Intermediate
/// tofrom maps never touch the host.
RouteTable infer_routes(const TaskGraph& graph, const Placement& placement,
                        const ClusterDesc& cluster);

/// Register writes that realize the plan, grouped by wave session and
/// ordered by (wave, fpga, offset).
std::vector<ConfWrite> gen_conf_writes(const TaskGraph& graph,
                                       const Placement& placement,
                                       const RouteTable& routes,
                                       const ClusterDesc& cluster);

std::string placement_to_json(const Placement& placement);
std::string routes_to_json(const RouteTable& routes);
std::string plan_to_json(const Placement& placement, const RouteTable& routes);

/// Flat text form, one `fpga offset value` line per write under its
/// `wave N` heading.
std::string conf_writes_text(const std::vector<ConfWrite>& writes);

}  // namespace fabric
