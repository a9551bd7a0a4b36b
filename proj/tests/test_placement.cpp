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

#include <map>
#include <optional>

#include "fabric/error.hpp"
#include "fabric/placement.hpp"
#include "testutil.hpp"

using namespace fabric;

namespace {

ClusterDesc cluster_file(const char* name) {
  return load_config_file(std::string(CONFIG_DIR) + "/" + name);
}

TaskGraph chain(uint32_t n, KernelKind kind = KernelKind::laplace2d,
                Dims dims = {2, 64, 64, 1}) {
  return build_pipeline_graph(StencilKernel::defaults(kind), "V", dims, n,
                              base_function_name(kind));
}

struct Plan {
  TaskGraph graph;
  Placement placement;
  RouteTable routes;
  std::vector<ConfWrite> writes;
};

Plan plan_chain(const ClusterDesc& c, uint32_t n,
                KernelKind kind = KernelKind::laplace2d) {
  Plan p;
  p.graph = chain(n, kind);
  p.placement = map_tasks(p.graph, c, VariantRegistry::builtin());
  p.routes = infer_routes(p.graph, p.placement, c);
  p.writes = gen_conf_writes(p.graph, p.placement, p.routes, c);
  return p;
}

uint32_t count_net_hops(const Route& r, uint32_t from, uint32_t to) {
  uint32_t n = 0;
  for (const Hop& h : r.hops)
    if (h.kind == HopKind::net_link && h.from == from && h.to == to) ++n;
  return n;
}

bool has_host_hop(const Route& r) {
  for (const Hop& h : r.hops)
    if (h.kind == HopKind::host_dma) return true;
  return false;
}

/// Replays the register image: pushes a token into the programmed fabric
/// and follows switch tables and MFH addressing until it lands somewhere.
struct FabricImage {
  // (wave, fpga) -> in_port -> out_port
  std::map<std::pair<uint32_t, uint32_t>, std::map<uint32_t, uint32_t>> sw;
  // (wave, fpga, tx lane) -> destination MAC
  std::map<std::tuple<uint32_t, uint32_t, uint32_t>, MacAddr> mfh_dst;

  explicit FabricImage(const std::vector<ConfWrite>& writes) {
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>,
             std::pair<uint32_t, uint32_t>>
        raw;
    for (const ConfWrite& w : writes) {
      if (w.meaning == ConfMeaning::switch_route) {
        sw[{w.wave, w.fpga}][(w.offset - kConfSwitchBase) / 4] = w.value;
      } else if (w.meaning == ConfMeaning::mfh_dst_mac) {
        uint32_t lane = (w.offset - kConfMfhBase) / kConfMfhStride;
        uint32_t field = (w.offset - kConfMfhBase) % kConfMfhStride;
        auto key = std::make_tuple(w.wave, w.fpga, lane);
        if (field == kConfMfhDstHi) raw[key].first = w.value;
        if (field == kConfMfhDstLo) raw[key].second = w.value;
      }
    }
    for (const auto& [key, hilo] : raw) {
      MacAddr m;
      m.bytes = {static_cast<uint8_t>(hilo.first >> 8),
                 static_cast<uint8_t>(hilo.first),
                 static_cast<uint8_t>(hilo.second >> 24),
                 static_cast<uint8_t>(hilo.second >> 16),
                 static_cast<uint8_t>(hilo.second >> 8),
                 static_cast<uint8_t>(hilo.second)};
      mfh_dst[key] = m;
    }
  }

  struct Arrival {
    bool host = false;
    uint32_t fpga = 0;
    uint32_t port = 0;
  };

  Arrival walk(const ClusterDesc& c, uint32_t wave, uint32_t fpga,
               uint32_t in_port, uint32_t resume_wave) const {
    for (int guard = 0; guard < 64; ++guard) {
      auto table = sw.find({wave, fpga});
      REQUIRE(table != sw.end());
      auto out = table->second.find(in_port);
      REQUIRE(out != table->second.end());
      uint32_t out_port = out->second;
      if (out_port == kPortHost) return {true, fpga, 0};
      if (out_port == kPortVfifo) {  // parked until the next session
        wave = resume_wave;
        in_port = kPortVfifo;
        continue;
      }
      if (out_port >= kPortNetBase && out_port < kPortNetBase + kNetLanes) {
        uint32_t tx_lane = out_port - kPortNetBase;
        auto dst = mfh_dst.find({wave, fpga, tx_lane});
        REQUIRE(dst != mfh_dst.end());
        bool found = false;
        for (const FpgaDesc& f : c.fpgas)
          for (std::size_t l = 0; l < f.macs.size(); ++l)
            if (f.macs[l] == dst->second) {
              fpga = f.id;
              in_port = kPortNetBase + static_cast<uint32_t>(l);
              found = true;
            }
        REQUIRE(found);  // a frame that nobody owns would circle forever
        continue;
      }
      return {false, fpga, out_port};  // an IP slot port
    }
    FAIL("replay walk did not terminate");
    return {};
  }
};

}  // namespace

TEST_CASE("single task lands on the first slot") {
  ClusterDesc c = cluster_file("ring6-laplace2d.json");
  Plan p = plan_chain(c, 1);
  CHECK(p.placement.of(0) == Assignment{0, 0, 0, 0});
  CHECK(p.placement.waves == 1);
  REQUIRE(p.routes.ingress.size() == 1);
  REQUIRE(p.routes.egress.size() == 1);
  CHECK(p.routes.edges.empty());
}

TEST_CASE("four tasks on two boards fill slots in ring order") {
  ClusterDesc c = cluster_file("fig1.json");
  Plan p = plan_chain(c, 4);
  CHECK(p.placement.of(0) == Assignment{0, 0, 0, 0});
  CHECK(p.placement.of(1) == Assignment{1, 0, 1, 0});
  CHECK(p.placement.of(2) == Assignment{2, 1, 0, 0});
  CHECK(p.placement.of(3) == Assignment{3, 1, 1, 0});
  CHECK(p.placement.waves == 1);
}

TEST_CASE("six tasks on four slots spill into a second wave") {
  ClusterDesc c = restrict_cluster(cluster_file("ring6-laplace2d.json"), 1, 4);
  Plan p = plan_chain(c, 6);
  CHECK(p.placement.waves == 2);
  CHECK(p.placement.of(3) == Assignment{3, 0, 3, 0});
  CHECK(p.placement.of(4) == Assignment{4, 0, 0, 1});
  CHECK(p.placement.of(5) == Assignment{5, 0, 1, 1});
}

TEST_CASE("wave zero fpga ids never decrease") {
  ClusterDesc c = cluster_file("ring6-laplace2d.json");
  for (uint32_t n : {3u, 8u, 17u, 24u}) {
    Plan p = plan_chain(c, n);
    uint32_t prev = 0;
    for (const Assignment& a : p.placement.assignments) {
      if (a.wave != 0) break;
      CHECK(a.fpga >= prev);
      prev = a.fpga;
    }
  }
}

TEST_CASE("boards sit at their ring distance from the host") {
  // Only board k hosts a compatible slot, so the ingress stream must cross
  // exactly k fibers to reach it.
  ClusterDesc base = cluster_file("ring6-laplace2d.json");
  for (uint32_t k = 0; k < 6; ++k) {
    ClusterDesc c = base;
    for (FpgaDesc& f : c.fpgas)
      if (f.id != k)
        for (IpSlot& s : f.ips) {
          s.kernel = KernelKind::diffusion2d;
          s.cost = c.ip_catalog.at(KernelKind::diffusion2d).cost;
        }
    Plan p = plan_chain(c, 1);
    CHECK(p.placement.of(0).fpga == k);
    uint32_t hops = 0;
    for (const Hop& h : p.routes.ingress[0].route.hops)
      if (h.kind == HopKind::net_link) ++hops;
    CHECK(hops == k);
  }
}

TEST_CASE("kernels without a compatible slot are rejected") {
  ClusterDesc c = cluster_file("ring6-laplace2d.json");
  TaskGraph g = chain(2, KernelKind::jacobi9pt2d);
  CHECK_THROWS_AS(map_tasks(g, c, VariantRegistry::builtin()), PlanError);
  // Empty context resolves to the cpu base, which has no slot either.
  TaskGraph g2 = chain(2);
  CHECK_THROWS_AS(map_tasks(g2, c, VariantRegistry::builtin(), {}), PlanError);
}

TEST_CASE("routes of the two-board scenario cross once per direction") {
  ClusterDesc c = cluster_file("fig1.json");
  Plan p = plan_chain(c, 4);
  REQUIRE(p.routes.edges.size() == 3);

  const Route& t01 = p.routes.edges[0].route;
  REQUIRE(t01.hops.size() == 1);
  CHECK(t01.hops[0].kind == HopKind::switch_port);

  const Route& t12 = p.routes.edges[1].route;
  CHECK(count_net_hops(t12, 0, 1) == 1);
  bool has_mfh0 = false, has_mfh1 = false;
  for (const Hop& h : t12.hops)
    if (h.kind == HopKind::mfh) (h.fpga == 0 ? has_mfh0 : has_mfh1) = true;
  CHECK(has_mfh0);
  CHECK(has_mfh1);

  const Route& back = p.routes.egress[0].route;
  CHECK(count_net_hops(back, 1, 0) == 1);

  uint32_t crossings_fwd = 0, crossings_back = 0;
  auto count_all = [&](const Route& r) {
    crossings_fwd += count_net_hops(r, 0, 1);
    crossings_back += count_net_hops(r, 1, 0);
  };
  for (const auto& r : p.routes.ingress) count_all(r.route);
  for (const auto& r : p.routes.edges) count_all(r.route);
  for (const auto& r : p.routes.egress) count_all(r.route);
  CHECK(crossings_fwd == 1);
  CHECK(crossings_back == 1);

  for (const EdgeRoute& e : p.routes.edges) CHECK(!has_host_hop(e.route));
}

TEST_CASE("wave boundaries route through the virtual fifo") {
  ClusterDesc c = restrict_cluster(cluster_file("ring6-laplace2d.json"), 1, 4);
  Plan p = plan_chain(c, 8);
  REQUIRE(p.routes.edges.size() == 7);
  const EdgeRoute& boundary = p.routes.edges[3];  // t3 -> t4
  CHECK(boundary.inter_wave);
  bool vfifo = false;
  for (const Hop& h : boundary.route.hops)
    if (h.kind == HopKind::vfifo) vfifo = true;
  CHECK(vfifo);
  CHECK(!has_host_hop(boundary.route));
  for (int i : {0, 1, 2, 4, 5, 6}) CHECK(!p.routes.edges[i].inter_wave);
}

TEST_CASE("conf writes for a single-board chain are five switch entries") {
  ClusterDesc c = restrict_cluster(cluster_file("ring6-laplace2d.json"), 1, 4);
  Plan p = plan_chain(c, 4);
  uint32_t sw = 0, mfh = 0;
  for (const ConfWrite& w : p.writes) {
    if (w.meaning == ConfMeaning::switch_route) ++sw;
    if (w.meaning == ConfMeaning::mfh_len) ++mfh;
  }
  CHECK(sw == 5);  // host->s0, s0->s1, s1->s2, s2->s3, s3->host
  CHECK(mfh == 0);
}

TEST_CASE("conf writes for the two-board scenario program two MFH sessions") {
  ClusterDesc c = cluster_file("fig1.json");
  Plan p = plan_chain(c, 4);
  uint32_t sessions = 0;
  for (const ConfWrite& w : p.writes)
    if (w.meaning == ConfMeaning::mfh_len) ++sessions;
  CHECK(sessions == 2);  // one encap toward board 1, one back toward board 0
  std::string text = conf_writes_text(p.writes);
  CHECK(text == testutil::read_file(std::string(TEST_DATA_DIR) +
                                    "/confwrites_fig1.txt"));
}

TEST_CASE("empty graph plans to nothing") {
  ClusterDesc c = cluster_file("single.json");
  GraphBuilder b;
  TaskGraph g = b.finalize_at_sync();
  Placement pl = map_tasks(g, c, VariantRegistry::builtin());
  CHECK(pl.assignments.empty());
  RouteTable rt = infer_routes(g, pl, c);
  CHECK(rt.ingress.empty());
  auto writes = gen_conf_writes(g, pl, rt, c);
  CHECK(writes.empty());
}

TEST_CASE("ip parameter writes carry dims and bit-cast coefficients") {
  ClusterDesc c = cluster_file("ring6-diffusion2d.json");
  Plan p = plan_chain(c, 1, KernelKind::diffusion2d);
  std::map<uint32_t, uint32_t> ip_regs;
  for (const ConfWrite& w : p.writes)
    if (w.meaning == ConfMeaning::ip_dims || w.meaning == ConfMeaning::ip_coeff)
      ip_regs[w.offset] = w.value;
  CHECK(ip_regs.at(kConfIpBase + 0) == 64);
  CHECK(ip_regs.at(kConfIpBase + 4) == 64);
  CHECK(ip_regs.at(kConfIpBase + 8) == 1);
  float c0;
  uint32_t v = ip_regs.at(kConfIpBase + 16);
  __builtin_memcpy(&c0, &v, 4);
  CHECK(c0 == 0.125f);
}

TEST_CASE("replaying the register image reproduces every route") {
  ClusterDesc full = cluster_file("ring6-laplace2d.json");
  for (uint32_t F : {1u, 2u, 3u}) {
    for (uint32_t ips : {1u, 2u, 4u}) {
      ClusterDesc c = restrict_cluster(full, F, ips);
      for (uint32_t n : {1u, 2u, 5u, 9u}) {
        Plan p = plan_chain(c, n);
        FabricImage image(p.writes);

        for (const HostRoute& r : p.routes.ingress) {
          const Assignment& a = p.placement.of(r.task);
          auto arr = image.walk(c, a.wave, 0, kPortHost, a.wave);
          CHECK(!arr.host);
          CHECK(arr.fpga == a.fpga);
          CHECK(arr.port == c.slot(a.fpga, a.slot).switch_port);
        }
        for (const EdgeRoute& e : p.routes.edges) {
          const Assignment& prod = p.placement.of(e.producer);
          const Assignment& cons = p.placement.of(e.consumer);
          auto arr = image.walk(c, prod.wave, prod.fpga,
                                c.slot(prod.fpga, prod.slot).switch_port,
                                cons.wave);
          CHECK(!arr.host);
          CHECK(arr.fpga == cons.fpga);
          CHECK(arr.port == c.slot(cons.fpga, cons.slot).switch_port);
        }
        for (const HostRoute& r : p.routes.egress) {
          const Assignment& a = p.placement.of(r.task);
          auto arr = image.walk(c, a.wave, a.fpga,
                                c.slot(a.fpga, a.slot).switch_port, a.wave);
          CHECK(arr.host);
          CHECK(arr.fpga == 0);
        }
      }
    }
  }
}

TEST_CASE("plan json dumps carry assignments and hops") {
  ClusterDesc c = cluster_file("fig1.json");
  Plan p = plan_chain(c, 4);
  std::string j = plan_to_json(p.placement, p.routes);
  CHECK(j.find("\"waves\": 1") != std::string::npos);
  CHECK(j.find("\"kind\": \"net\"") != std::string::npos);
  CHECK(placement_to_json(p.placement).find("\"task\": 3") !=
        std::string::npos);
  CHECK(routes_to_json(p.routes).find("\"ingress\"") != std::string::npos);
}
