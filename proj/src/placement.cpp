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

#include "fabric/placement.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <deque>
#include <map>
#include <tuple>

#include "json.hpp"

#include "fabric/error.hpp"

namespace fabric {

using nlohmann::json;

const char* conf_meaning_name(ConfMeaning meaning) {
  switch (meaning) {
    case ConfMeaning::switch_route: return "switch_route";
    case ConfMeaning::mfh_src_mac: return "mfh_src_mac";
    case ConfMeaning::mfh_dst_mac: return "mfh_dst_mac";
    case ConfMeaning::mfh_len: return "mfh_len";
    case ConfMeaning::ip_coeff: return "ip_coeff";
    case ConfMeaning::ip_dims: return "ip_dims";
  }
  return "?";
}

namespace {

struct SlotRef {
  uint32_t fpga = 0;
  uint32_t slot = 0;
  KernelKind kind = KernelKind::laplace2d;
  uint32_t port = 0;
};

std::vector<SlotRef> slot_order(const ClusterDesc& cluster) {
  std::vector<SlotRef> slots;
  for (const FpgaDesc& f : cluster.fpgas)
    for (const IpSlot& s : f.ips)
      slots.push_back({f.id, s.slot_id, s.kernel, s.switch_port});
  return slots;
}

struct LinkStep {
  uint32_t from = 0, to = 0, from_port = 0, to_port = 0;
};

/// Shortest board-to-board path following the fiber directions; ties
/// prefer the lowest next board id so route choice is reproducible.
std::vector<LinkStep> board_path(const ClusterDesc& cluster, uint32_t src,
                                 uint32_t dst) {
  if (src == dst) return {};
  const uint32_t F = static_cast<uint32_t>(cluster.fpgas.size());
  struct Adj {
    uint32_t to, my_port, their_port;
  };
  std::vector<std::vector<Adj>> adj(F);
  for (const LinkDesc& l : cluster.links)
    adj[l.fpga_a].push_back({l.fpga_b, l.port_a, l.port_b});
  for (auto& a : adj)
    std::sort(a.begin(), a.end(), [](const Adj& x, const Adj& y) {
      return x.to != y.to ? x.to < y.to : x.my_port < y.my_port;
    });

  std::vector<int64_t> parent(F, -1);
  std::vector<Adj> via(F);
  std::deque<uint32_t> frontier{src};
  std::vector<bool> seen(F, false);
  seen[src] = true;
  while (!frontier.empty()) {
    uint32_t b = frontier.front();
    frontier.pop_front();
    if (b == dst) break;
    for (const Adj& a : adj[b]) {
      if (seen[a.to]) continue;
      seen[a.to] = true;
      parent[a.to] = b;
      via[a.to] = a;
      frontier.push_back(a.to);
    }
  }
  if (!seen[dst])
    throw PlanError("unroutable edge: no fiber path from FPGA " +
                    std::to_string(src) + " to FPGA " + std::to_string(dst));
  std::vector<LinkStep> steps;
  for (uint32_t b = dst; b != src; b = static_cast<uint32_t>(parent[b])) {
    uint32_t p = static_cast<uint32_t>(parent[b]);
    steps.push_back({p, b, via[b].my_port, via[b].their_port});
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

Hop switch_hop(uint32_t fpga, uint32_t in, uint32_t out) {
  Hop h;
  h.kind = HopKind::switch_port;
  h.fpga = fpga;
  h.in_port = in;
  h.out_port = out;
  return h;
}

Hop simple_hop(HopKind kind, uint32_t fpga = 0) {
  Hop h;
  h.kind = kind;
  h.fpga = fpga;
  return h;
}

Hop net_hop(const LinkStep& s) {
  Hop h;
  h.kind = HopKind::net_link;
  h.from = s.from;
  h.to = s.to;
  h.from_port = s.from_port;
  h.to_port = s.to_port;
  return h;
}

Hop mfh_hop(uint32_t fpga, uint32_t lane) {
  Hop h;
  h.kind = HopKind::mfh;
  h.fpga = fpga;
  h.lane = lane;
  return h;
}

/// Hands out NET lanes per board and wave session. Concurrent streams on
/// one board need distinct lanes or their frames could not be told apart.
class LaneAlloc {
 public:
  uint32_t take(const ClusterDesc& cluster, uint32_t fpga, uint32_t wave,
                uint32_t preferred) {
    const uint32_t lanes =
        static_cast<uint32_t>(cluster.fpga(fpga).macs.size());
    uint32_t& mask = used_[{fpga, wave}];
    if (preferred < lanes && !(mask & (1u << preferred))) {
      mask |= 1u << preferred;
      return preferred;
    }
    for (uint32_t l = 0; l < lanes; ++l) {
      if (!(mask & (1u << l))) {
        mask |= 1u << l;
        return l;
      }
    }
    throw PlanError("out of NET lanes on FPGA " + std::to_string(fpga) +
                    " in wave " + std::to_string(wave));
  }

 private:
  std::map<std::pair<uint32_t, uint32_t>, uint32_t> used_;
};

/// Stream leg from one switch port to another, crossing the ring when the
/// boards differ. Crossings transmit on a lane of the source board and are
/// addressed to a lane of the destination board; the physical SFP port of
/// the chosen path is preferred when it is still free.
struct SegmentBuilder {
  const ClusterDesc& cluster;
  LaneAlloc tx;
  LaneAlloc rx;

  void append(std::vector<Hop>& hops, uint32_t from_fpga, uint32_t from_port,
              uint32_t to_fpga, uint32_t to_port, uint32_t wave) {
    if (from_fpga == to_fpga) {
      hops.push_back(switch_hop(from_fpga, from_port, to_port));
      return;
    }
    const auto path = board_path(cluster, from_fpga, to_fpga);
    const uint32_t tx_lane =
        tx.take(cluster, from_fpga, wave, path.front().from_port);
    const uint32_t rx_lane =
        rx.take(cluster, to_fpga, wave, path.back().to_port);
    hops.push_back(switch_hop(from_fpga, from_port, kPortNetBase + tx_lane));
    hops.push_back(mfh_hop(from_fpga, tx_lane));
    for (const LinkStep& s : path) hops.push_back(net_hop(s));
    hops.push_back(mfh_hop(to_fpga, rx_lane));
    hops.push_back(switch_hop(to_fpga, kPortNetBase + rx_lane, to_port));
  }
};

/// Tasks that move a given buffer, in creation order.
struct BufferChain {
  std::string buffer;
  std::vector<TaskId> tasks;
  MapDir first_dir = MapDir::tofrom;
  MapDir last_dir = MapDir::tofrom;
  uint64_t bytes = 0;
};

std::vector<BufferChain> buffer_chains(const TaskGraph& graph) {
  std::vector<BufferChain> chains;
  auto find = [&](const std::string& b) -> BufferChain& {
    for (BufferChain& c : chains)
      if (c.buffer == b) return c;
    chains.push_back({b, {}, MapDir::tofrom, MapDir::tofrom, 0});
    return chains.back();
  };
  for (const TaskNode& n : graph.nodes) {
    if (n.maps.size() != 1 || n.maps[0].buffer != n.args.buffer)
      throw PlanError("task " + std::to_string(n.id) +
                      " must map exactly its grid buffer");
    const MapEntry& m = n.maps[0];
    BufferChain& c = find(m.buffer);
    if (c.tasks.empty()) {
      c.first_dir = m.dir;
      c.bytes = m.bytes;
    } else if (c.bytes != m.bytes) {
      throw PlanError("buffer '" + m.buffer +
                      "' mapped with inconsistent lengths");
    }
    c.last_dir = m.dir;
    c.tasks.push_back(n.id);
  }
  // Consecutive movers of one buffer must be ordered by a dependence, or
  // the stream would fork.
  for (const BufferChain& c : chains) {
    for (std::size_t i = 0; i + 1 < c.tasks.size(); ++i) {
      bool linked = false;
      for (const Edge& e : graph.edges)
        if (e.producer == c.tasks[i] && e.consumer == c.tasks[i + 1])
          linked = true;
      if (!linked)
        throw PlanError("buffer '" + c.buffer + "' moves from task " +
                        std::to_string(c.tasks[i]) + " to task " +
                        std::to_string(c.tasks[i + 1]) +
                        " without a dependence between them");
    }
  }
  return chains;
}

}  // namespace

Placement map_tasks(const TaskGraph& graph, const ClusterDesc& cluster,
                    const VariantRegistry& registry,
                    const std::set<std::string>& active_ctx) {
  const std::vector<SlotRef> slots = slot_order(cluster);
  Placement p;
  if (graph.nodes.empty()) return p;
  if (slots.empty()) throw PlanError("cluster has no IP slots");

  std::vector<KernelKind> want(graph.nodes.size());
  for (const TaskNode& n : graph.nodes) {
    const VariantEntry& e = registry.resolve(n.kernel_ref, active_ctx);
    if (e.kind != VariantKind::ip_variant)
      throw PlanError("task " + std::to_string(n.id) + " ('" + n.kernel_ref +
                      "') resolves to the cpu base under the active context; "
                      "nothing to place");
    want[n.id] = *e.ip_kernel;
    bool any = std::any_of(slots.begin(), slots.end(), [&](const SlotRef& s) {
      return s.kind == *e.ip_kernel;
    });
    if (!any)
      throw PlanError(std::string("no compatible slot for kernel ") +
                      kernel_name(*e.ip_kernel));
  }

  const std::size_t S = slots.size();
  std::vector<bool> used(S, false);
  std::size_t cursor = 0;
  uint32_t wave = 0;
  p.assignments.resize(graph.nodes.size());
  for (const TaskNode& n : graph.nodes) {
    std::size_t failed = 0;
    for (;;) {
      if (!used[cursor] && slots[cursor].kind == want[n.id]) break;
      ++failed;
      cursor = (cursor + 1) % S;
      if (failed == S) {  // every slot consumed or incompatible: next wave
        ++wave;
        std::fill(used.begin(), used.end(), false);
        failed = 0;
      }
    }
    p.assignments[n.id] =
        Assignment{n.id, slots[cursor].fpga, slots[cursor].slot, wave};
    used[cursor] = true;
    cursor = (cursor + 1) % S;
  }
  p.waves = wave + 1;
  return p;
}

RouteTable infer_routes(const TaskGraph& graph, const Placement& placement,
                        const ClusterDesc& cluster) {
  RouteTable table;
  if (graph.nodes.empty()) return table;
  if (placement.assignments.size() != graph.nodes.size())
    throw PlanError("placement does not cover the task graph");

  auto slot_port = [&](const Assignment& a) {
    return cluster.slot(a.fpga, a.slot).switch_port;
  };
  SegmentBuilder seg{cluster, {}, {}};

  for (const BufferChain& chain : buffer_chains(graph)) {
    const Assignment& first = placement.of(chain.tasks.front());
    const Assignment& last = placement.of(chain.tasks.back());

    if (chain.first_dir == MapDir::from)
      throw PlanError("buffer '" + chain.buffer +
                      "' is read back before any task maps it to the device");
    HostRoute in;
    in.buffer = chain.buffer;
    in.task = chain.tasks.front();
    in.route.hops.push_back(simple_hop(HopKind::host_dma));
    in.route.hops.push_back(simple_hop(HopKind::vfifo, 0));
    seg.append(in.route.hops, 0, kPortHost, first.fpga, slot_port(first),
               first.wave);
    table.ingress.push_back(std::move(in));

    for (std::size_t i = 0; i + 1 < chain.tasks.size(); ++i) {
      const Assignment& prod = placement.of(chain.tasks[i]);
      const Assignment& cons = placement.of(chain.tasks[i + 1]);
      EdgeRoute er;
      er.producer = chain.tasks[i];
      er.consumer = chain.tasks[i + 1];
      er.buffer = chain.buffer;
      er.producer_wave = prod.wave;
      er.consumer_wave = cons.wave;
      er.inter_wave = cons.wave != prod.wave;
      if (!er.inter_wave) {
        seg.append(er.route.hops, prod.fpga, slot_port(prod), cons.fpga,
                   slot_port(cons), prod.wave);
      } else {
        // Park the stream in DDR until the next session reprograms the
        // switch; any crossing happens under the consumer's session.
        er.route.hops.push_back(
            switch_hop(prod.fpga, slot_port(prod), kPortVfifo));
        er.route.hops.push_back(simple_hop(HopKind::vfifo, prod.fpga));
        seg.append(er.route.hops, prod.fpga, kPortVfifo, cons.fpga,
                   slot_port(cons), cons.wave);
      }
      table.edges.push_back(std::move(er));
    }

    if (chain.last_dir != MapDir::to) {
      HostRoute out;
      out.buffer = chain.buffer;
      out.task = chain.tasks.back();
      seg.append(out.route.hops, last.fpga, slot_port(last), 0, kPortHost,
                 last.wave);
      out.route.hops.push_back(simple_hop(HopKind::vfifo, 0));
      out.route.hops.push_back(simple_hop(HopKind::host_dma));
      table.egress.push_back(std::move(out));
    }
  }
  return table;
}

namespace {

uint32_t mac_hi(const MacAddr& m) {
  return (uint32_t(m.bytes[0]) << 8) | m.bytes[1];
}
uint32_t mac_lo(const MacAddr& m) {
  return (uint32_t(m.bytes[2]) << 24) | (uint32_t(m.bytes[3]) << 16) |
         (uint32_t(m.bytes[4]) << 8) | m.bytes[5];
}

/// Accumulates the per-session register image, rejecting contradictory
/// programming.
struct ConfBuilder {
  // (wave, fpga, offset) -> (value, meaning)
  std::map<std::tuple<uint32_t, uint32_t, uint32_t>,
           std::pair<uint32_t, ConfMeaning>>
      regs;

  void put(uint32_t wave, uint32_t fpga, uint32_t offset, uint32_t value,
           ConfMeaning meaning, const char* what) {
    if (offset >= kConfEnd || offset < kConfBase)
      throw PlanError("register range overflow at offset " +
                      std::to_string(offset));
    auto key = std::make_tuple(wave, fpga, offset);
    auto it = regs.find(key);
    if (it != regs.end()) {
      if (it->second.first != value)
        throw PlanError(std::string("conflicting ") + what +
                        " programming on FPGA " + std::to_string(fpga) +
                        " in wave " + std::to_string(wave));
      return;
    }
    regs.emplace(key, std::make_pair(value, meaning));
  }

  void switch_entry(uint32_t wave, uint32_t fpga, uint32_t in, uint32_t out) {
    put(wave, fpga, kConfSwitchBase + 4 * in, out, ConfMeaning::switch_route,
        "switch route");
  }

  void mfh_session(uint32_t wave, uint32_t fpga, uint32_t lane,
                   const MacAddr& src, const MacAddr& dst, uint64_t bytes) {
    const uint32_t base = kConfMfhBase + kConfMfhStride * lane;
    put(wave, fpga, base + kConfMfhDstHi, mac_hi(dst),
        ConfMeaning::mfh_dst_mac, "MFH");
    put(wave, fpga, base + kConfMfhDstLo, mac_lo(dst),
        ConfMeaning::mfh_dst_mac, "MFH");
    put(wave, fpga, base + kConfMfhSrcHi, mac_hi(src),
        ConfMeaning::mfh_src_mac, "MFH");
    put(wave, fpga, base + kConfMfhSrcLo, mac_lo(src),
        ConfMeaning::mfh_src_mac, "MFH");
    put(wave, fpga, base + kConfMfhLen, static_cast<uint32_t>(bytes),
        ConfMeaning::mfh_len, "MFH");
  }

  /// Walks a route, filing each hop under its wave. Inter-wave routes
  /// switch sessions after the FIFO parking point.
  void add_route(const ClusterDesc& cluster, const Route& route,
                 uint32_t wave_before, uint32_t wave_after, uint64_t bytes) {
    uint32_t wave = wave_before;
    const auto& hops = route.hops;
    for (std::size_t i = 0; i < hops.size(); ++i) {
      const Hop& h = hops[i];
      switch (h.kind) {
        case HopKind::switch_port:
          switch_entry(wave, h.fpga, h.in_port, h.out_port);
          break;
        case HopKind::mfh:
          if (i + 1 < hops.size() && hops[i + 1].kind == HopKind::net_link) {
            std::size_t j = i + 1;
            while (j < hops.size() && hops[j].kind == HopKind::net_link) ++j;
            if (j >= hops.size() || hops[j].kind != HopKind::mfh)
              throw PlanError("crossing without a receive-side frame handler");
            const Hop& decap = hops[j];
            mfh_session(wave, h.fpga, h.lane,
                        cluster.fpga(h.fpga).macs.at(h.lane),
                        cluster.fpga(decap.fpga).macs.at(decap.lane), bytes);
          }
          break;
        case HopKind::vfifo:
          if (wave_after != wave_before) wave = wave_after;
          break;
        default:
          break;
      }
    }
  }
};

}  // namespace

std::vector<ConfWrite> gen_conf_writes(const TaskGraph& graph,
                                       const Placement& placement,
                                       const RouteTable& routes,
                                       const ClusterDesc& cluster) {
  ConfBuilder b;
  auto chain_bytes = [&](const std::string& buffer) -> uint64_t {
    for (const TaskNode& n : graph.nodes)
      for (const MapEntry& m : n.maps)
        if (m.buffer == buffer) return m.bytes;
    throw PlanError("route references unmapped buffer '" + buffer + "'");
  };

  for (const HostRoute& r : routes.ingress) {
    uint32_t w = placement.of(r.task).wave;
    b.add_route(cluster, r.route, w, w, chain_bytes(r.buffer));
  }
  for (const EdgeRoute& r : routes.edges)
    b.add_route(cluster, r.route, r.producer_wave, r.consumer_wave,
                chain_bytes(r.buffer));
  for (const HostRoute& r : routes.egress) {
    uint32_t w = placement.of(r.task).wave;
    b.add_route(cluster, r.route, w, w, chain_bytes(r.buffer));
  }

  // Per-task IP parameters, one block per slot in the task's wave.
  for (const Assignment& a : placement.assignments) {
    const TaskNode& n = graph.nodes.at(a.task);
    const uint32_t base = kConfIpBase + a.slot * kConfIpStride;
    b.put(a.wave, a.fpga, base + 0, n.args.dims.h, ConfMeaning::ip_dims,
          "IP dims");
    b.put(a.wave, a.fpga, base + 4, n.args.dims.w, ConfMeaning::ip_dims,
          "IP dims");
    b.put(a.wave, a.fpga, base + 8, n.args.dims.d, ConfMeaning::ip_dims,
          "IP dims");
    for (std::size_t ci = 0; ci < n.args.coeffs.size(); ++ci)
      b.put(a.wave, a.fpga,
            base + 16 + 4 * static_cast<uint32_t>(ci),
            std::bit_cast<uint32_t>(n.args.coeffs[ci]), ConfMeaning::ip_coeff,
            "IP coefficients");
  }

  std::vector<ConfWrite> out;
  out.reserve(b.regs.size());
  for (const auto& [key, val] : b.regs)
    out.push_back({std::get<1>(key), std::get<0>(key), std::get<2>(key),
                   val.first, val.second});
  return out;
}

namespace {

json hop_json(const Hop& h) {
  switch (h.kind) {
    case HopKind::host_dma: return {{"kind", "host_dma"}};
    case HopKind::vfifo: return {{"kind", "vfifo"}, {"fpga", h.fpga}};
    case HopKind::switch_port:
      return {{"kind", "switch"},
              {"fpga", h.fpga},
              {"in", h.in_port},
              {"out", h.out_port}};
    case HopKind::mfh:
      return {{"kind", "mfh"}, {"fpga", h.fpga}, {"lane", h.lane}};
    case HopKind::net_link:
      return {{"kind", "net"},
              {"from", h.from},
              {"to", h.to},
              {"from_port", h.from_port},
              {"to_port", h.to_port}};
  }
  return {};
}

json route_json(const Route& r) {
  json out = json::array();
  for (const Hop& h : r.hops) out.push_back(hop_json(h));
  return out;
}

json placement_json_obj(const Placement& p) {
  json j;
  j["waves"] = p.waves;
  j["assignments"] = json::array();
  for (const Assignment& a : p.assignments)
    j["assignments"].push_back({{"task", a.task},
                                {"fpga", a.fpga},
                                {"slot", a.slot},
                                {"wave", a.wave}});
  return j;
}

json routes_json_obj(const RouteTable& t) {
  json j;
  j["ingress"] = json::array();
  for (const HostRoute& r : t.ingress)
    j["ingress"].push_back(
        {{"buffer", r.buffer}, {"task", r.task}, {"hops", route_json(r.route)}});
  j["edges"] = json::array();
  for (const EdgeRoute& r : t.edges)
    j["edges"].push_back({{"from", r.producer},
                          {"to", r.consumer},
                          {"buffer", r.buffer},
                          {"inter_wave", r.inter_wave},
                          {"hops", route_json(r.route)}});
  j["egress"] = json::array();
  for (const HostRoute& r : t.egress)
    j["egress"].push_back(
        {{"buffer", r.buffer}, {"task", r.task}, {"hops", route_json(r.route)}});
  return j;
}

}  // namespace

std::string placement_to_json(const Placement& placement) {
  return placement_json_obj(placement).dump(2) + "\n";
}

std::string routes_to_json(const RouteTable& routes) {
  return routes_json_obj(routes).dump(2) + "\n";
}

std::string plan_to_json(const Placement& placement,
                         const RouteTable& routes) {
  json j;
  j["placement"] = placement_json_obj(placement);
  j["routes"] = routes_json_obj(routes);
  return j.dump(2) + "\n";
}

std::string conf_writes_text(const std::vector<ConfWrite>& writes) {
  std::string out;
  char buf[64];
  uint32_t wave = 0;
  bool first = true;
  for (const ConfWrite& w : writes) {
    if (first || w.wave != wave) {
      out += "wave " + std::to_string(w.wave) + "\n";
      wave = w.wave;
      first = false;
    }
    std::snprintf(buf, sizeof(buf), "%u 0x%04x 0x%08x\n", w.fpga, w.offset,
                  w.value);
    out += buf;
  }
  return out;
}

}  // namespace fabric
