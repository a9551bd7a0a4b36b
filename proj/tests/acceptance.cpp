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

// End-to-end acceptance suite. Each test case checks one release
// criterion at its stated tolerance and prints a single verdict line.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fabric/cluster.hpp"
#include "fabric/ip_pipeline.hpp"
#include "fabric/mac_frame.hpp"
#include "fabric/metrics.hpp"
#include "fabric/placement.hpp"
#include "fabric/sim.hpp"
#include "fabric/task_graph.hpp"
#include "fabric/variant_registry.hpp"
#include "testutil.hpp"

using namespace fabric;

namespace {

struct Criterion {
  const char* name;
  bool ok = true;
  explicit Criterion(const char* n) : name(n) {}
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::printf("       %s\n", what.c_str());
    }
  }
  ~Criterion() {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    std::fflush(stdout);
  }
};

ClusterDesc cluster_file(const char* name) {
  return load_config_file(std::string(CONFIG_DIR) + "/" + name);
}

/// Base ring with every slot re-kinded, then restricted.
ClusterDesc shaped_cluster(uint32_t fpgas, uint32_t ips, KernelKind kind) {
  ClusterDesc c = cluster_file("ring6-laplace2d.json");
  for (FpgaDesc& f : c.fpgas)
    for (IpSlot& s : f.ips) {
      s.kernel = kind;
      s.cost = c.ip_catalog.at(kind).cost;
    }
  return restrict_cluster(c, fpgas, ips);
}

struct RunArtifacts {
  SimResult result;
  std::string graph_json;
  std::string plan_json;
  std::string conf_text;
};

RunArtifacts simulate_chain(const ClusterDesc& c, const StencilKernel& kernel,
                            const Grid& input, uint32_t n,
                            bool trace = false) {
  RunArtifacts out;
  TaskGraph graph = build_pipeline_graph(kernel, "V", input.dims, n,
                                         base_function_name(kernel.kind));
  Placement placement = map_tasks(graph, c, VariantRegistry::builtin());
  RouteTable routes = infer_routes(graph, placement, c);
  auto writes = gen_conf_writes(graph, placement, routes, c);
  SimParams params;
  params.record_trace = trace;
  out.result =
      simulate(graph, placement, routes, writes, {{"V", input}}, c, params);
  out.graph_json = graph_to_json(graph);
  out.plan_json = plan_to_json(placement, routes);
  out.conf_text = conf_writes_text(writes);
  return out;
}

double elapsed_of(const ClusterDesc& c, KernelKind kind, const Grid& input,
                  uint32_t n) {
  StencilKernel k = StencilKernel::defaults(kind);
  return simulate_chain(c, k, input, n).result.elapsed_s;
}

}  // namespace

TEST_CASE("criterion 1: oracle equivalence") {
  Criterion crit(
      "criterion 1: simulator egress is bitwise equal to the software "
      "oracle over 500 randomized cases");
  const auto t0 = std::chrono::steady_clock::now();
  struct Shape {
    uint32_t fpgas, ips;
  };
  const Shape shapes[] = {{1, 1}, {1, 4}, {2, 2}, {3, 2}, {6, 4}};
  testutil::Rng rng(0xACCE55);
  int cases = 0, failures = 0;
  while (cases < 500) {
    for (KernelKind kind : all_kernel_kinds()) {
      const Shape& shape = shapes[cases % 5];
      ClusterDesc c = shaped_cluster(shape.fpgas, shape.ips, kind);
      Dims dims;
      if (kernel_rank(kind) == 2)
        dims = {2, rng.range(3, 64), rng.range(3, 64), 1};
      else
        dims = {3, rng.range(3, 64), rng.range(3, 64), rng.range(3, 64)};
      Grid input = testutil::random_grid(dims, rng.next());
      const uint32_t n = rng.range(1, 12);
      StencilKernel k = StencilKernel::defaults(kind);
      RunArtifacts run = simulate_chain(c, k, input, n);
      Grid oracle = run_iterations(k, input, n);
      if (!run.result.buffers.count("V") ||
          !bitwise_equal(run.result.buffers.at("V"), oracle)) {
        ++failures;
        crit.expect(false, std::string("mismatch: ") + kernel_name(kind) +
                               " " + dims.str() + " chain " +
                               std::to_string(n));
      }
      ++cases;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  crit.expect(failures == 0, std::to_string(failures) + " mismatches");
  crit.expect(secs < 120.0,
              "took " + std::to_string(secs) + "s, budget is 120s");
  std::printf("       %d cases in %.1fs\n", cases, secs);
  CHECK(crit.ok);
}

TEST_CASE("criterion 2: canonical pipeline graph shape") {
  Criterion crit(
      "criterion 2: N-task offload programs build an N-1 edge raw path "
      "graph matching the golden exports");
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  for (uint32_t n : {1u, 4u, 240u}) {
    TaskGraph g = build_pipeline_graph(k, "V", {2, 8, 8, 1}, n,
                                       "do_laplace2d");
    crit.expect(g.nodes.size() == n, "node count");
    crit.expect(g.edges.size() == n - 1, "edge count");
    bool all_raw = true, path = true;
    for (uint32_t i = 0; i + 1 < n; ++i) {
      if (g.edges[i].cause != EdgeCause::raw) all_raw = false;
      if (g.edges[i].producer != i || g.edges[i].consumer != i + 1)
        path = false;
    }
    crit.expect(all_raw && path, "edges are not a raw path");
    std::string golden = testutil::read_file(
        std::string(TEST_DATA_DIR) + "/graph_n" + std::to_string(n) + ".json");
    crit.expect(graph_to_json(g) == golden,
                "graph json differs from golden n=" + std::to_string(n));
  }
  CHECK(crit.ok);
}

TEST_CASE("criterion 3: placement conformance") {
  Criterion crit(
      "criterion 3: two-board scenario assignment with one crossing per "
      "direction; six tasks on four slots give two waves");
  ClusterDesc fig1 = cluster_file("fig1.json");
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  TaskGraph g =
      build_pipeline_graph(k, "V", {2, 64, 64, 1}, 4, "do_laplace2d");
  Placement p = map_tasks(g, fig1, VariantRegistry::builtin());
  crit.expect(p.of(0) == Assignment{0, 0, 0, 0}, "task 0 placement");
  crit.expect(p.of(1) == Assignment{1, 0, 1, 0}, "task 1 placement");
  crit.expect(p.of(2) == Assignment{2, 1, 0, 0}, "task 2 placement");
  crit.expect(p.of(3) == Assignment{3, 1, 1, 0}, "task 3 placement");
  crit.expect(p.waves == 1, "waves");

  RouteTable routes = infer_routes(g, p, fig1);
  uint32_t fwd = 0, back = 0;
  auto count = [&](const Route& r) {
    for (const Hop& h : r.hops) {
      if (h.kind != HopKind::net_link) continue;
      if (h.from == 0) ++fwd;
      if (h.from == 1) ++back;
    }
  };
  for (const auto& r : routes.ingress) count(r.route);
  for (const auto& r : routes.edges) count(r.route);
  for (const auto& r : routes.egress) count(r.route);
  crit.expect(fwd == 1, "forward crossings = " + std::to_string(fwd));
  crit.expect(back == 1, "backward crossings = " + std::to_string(back));

  ClusterDesc one = restrict_cluster(cluster_file("ring6-laplace2d.json"), 1, 4);
  TaskGraph g6 =
      build_pipeline_graph(k, "V", {2, 16, 16, 1}, 6, "do_laplace2d");
  Placement p6 = map_tasks(g6, one, VariantRegistry::builtin());
  crit.expect(p6.waves == 2, "six tasks should need two waves");
  crit.expect(p6.of(4) == Assignment{4, 0, 0, 1}, "task 4 reuses slot 0");
  crit.expect(p6.of(5) == Assignment{5, 0, 1, 1}, "task 5 reuses slot 1");
  CHECK(crit.ok);
}

TEST_CASE("criterion 4: host transfer minimality") {
  Criterion crit(
      "criterion 4: one-wave chains move data host<->fabric exactly twice, "
      "per the event trace");
  ClusterDesc c = cluster_file("ring6-laplace2d.json");
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  Grid input = testutil::random_grid({2, 24, 24, 1}, 9);
  for (uint32_t n : {1u, 2u, 5u, 12u, 24u}) {
    RunArtifacts run = simulate_chain(c, k, input, n, /*trace=*/true);
    uint32_t host_events = 0;
    for (const TraceEvent& e : run.result.trace)
      if (e.component == "host_dma") ++host_events;
    crit.expect(host_events == 2, "chain " + std::to_string(n) + " made " +
                                      std::to_string(host_events) +
                                      " host transfers");
    crit.expect(run.result.host_transfers == 2, "summary counter");
  }
  CHECK(crit.ok);
}

TEST_CASE("criterion 5: fpga scaling trend") {
  Criterion crit(
      "criterion 5: speedup at F boards is >= 0.85*F for F=2..6 and "
      "monotone, desk grid 1024x128 x240");
  const auto t0 = std::chrono::steady_clock::now();
  ClusterDesc full = cluster_file("ring6-laplace2d.json");
  Grid input = testutil::random_grid({2, 1024, 128, 1}, 4);
  double base = 0, prev_speedup = 0;
  for (uint32_t F = 1; F <= 6; ++F) {
    ClusterDesc c = restrict_cluster(full, F);
    double elapsed = elapsed_of(c, KernelKind::laplace2d, input, 240);
    if (F == 1) {
      base = elapsed;
      prev_speedup = 1.0;
      continue;
    }
    double speedup = base / elapsed;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "F=%u speedup %.3f (floor %.2f)", F,
                  speedup, 0.85 * F);
    std::printf("       %s\n", buf);
    crit.expect(speedup >= 0.85 * F, buf);
    crit.expect(speedup >= prev_speedup, "speedup dropped at F=" +
                                             std::to_string(F));
    prev_speedup = speedup;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  crit.expect(secs < 60.0, "took " + std::to_string(secs) + "s, budget 60s");
  CHECK(crit.ok);
}

TEST_CASE("criterion 6: single-IP iteration flatness") {
  Criterion crit(
      "criterion 6: one IP sweeping 30..240 iterations holds GFLOPS within "
      "10%");
  ClusterDesc c = restrict_cluster(cluster_file("ring6-laplace2d.json"), 1, 1);
  Grid input = testutil::random_grid({2, 1024, 128, 1}, 4);
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  double lo = 1e300, hi = 0;
  for (uint32_t iters : {30u, 60u, 120u, 240u}) {
    double elapsed = elapsed_of(c, KernelKind::laplace2d, input, iters);
    double g = compute_gflops(k, input.dims, iters, elapsed);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "GFLOPS spread %.2f%%",
                100.0 * (hi - lo) / lo);
  std::printf("       %s\n", buf);
  crit.expect((hi - lo) / lo < 0.10, buf);
  CHECK(crit.ok);
}

TEST_CASE("criterion 7: ip scaling separation") {
  Criterion crit(
      "criterion 7: at 240 iterations GFLOPS strictly increases with the "
      "IP count 1..4");
  ClusterDesc full = cluster_file("ring6-laplace2d.json");
  Grid input = testutil::random_grid({2, 1024, 128, 1}, 4);
  StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
  double prev = 0;
  for (uint32_t ips = 1; ips <= 4; ++ips) {
    ClusterDesc c = restrict_cluster(full, 1, ips);
    double elapsed = elapsed_of(c, KernelKind::laplace2d, input, 240);
    double g = compute_gflops(k, input.dims, 240, elapsed);
    crit.expect(g > prev, std::to_string(ips) + " IPs: " + std::to_string(g) +
                              " not above " + std::to_string(prev));
    prev = g;
  }
  CHECK(crit.ok);
}

TEST_CASE("criterion 8: frame round trip") {
  Criterion crit(
      "criterion 8: decap(encap(p)) == p for 10000 random payloads with "
      "exact 1500-byte segmentation");
  const MacAddr src = MacAddr::parse("02:00:00:0f:00:00");
  const MacAddr dst = MacAddr::parse("02:00:00:0f:01:00");
  testutil::Rng rng(0xF4A3E5);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    std::size_t n = 1 + rng.below(20000);
    std::vector<uint8_t> payload(n);
    for (auto& b : payload) b = static_cast<uint8_t>(rng.next());
    auto frames = mfh_encap(payload, src, dst, 1500);
    if (frames.size() != (n + 1499) / 1500) ++bad;
    for (std::size_t f = 0; f + 1 < frames.size(); ++f)
      if (frames[f].payload.size() != 1500) ++bad;
    if (frames.back().payload.size() != n - (frames.size() - 1) * 1500) ++bad;
    if (mfh_decap(frames) != payload) ++bad;
  }
  crit.expect(bad == 0, std::to_string(bad) + " bad cases");
  CHECK(crit.ok);
}

TEST_CASE("criterion 9: resource budget") {
  Criterion crit(
      "criterion 9: reference utilization reproduces within 0.1% and the "
      "quad-jacobi board is rejected");
  auto catalog = default_ip_catalog();
  const ResourceVec cap = kDefaultCapacity;
  struct Row {
    KernelKind kind;
    double luts, brams, dsps;
  };
  const Row rows[] = {
      {KernelKind::laplace2d, 7.5, 0.7, 0.4},
      {KernelKind::diffusion2d, 15.4, 0.7, 2.2},
      {KernelKind::jacobi9pt2d, 28.3, 0.7, 4.0},
      {KernelKind::laplace3d, 13.5, 6.0, 0.5},
      {KernelKind::diffusion3d, 17.1, 2.1, 2.7},
  };
  for (const Row& r : rows) {
    const ResourceVec& cost = catalog.at(r.kind).cost;
    auto pct = [](uint64_t num, uint64_t den) {
      return 100.0 * static_cast<double>(num) / static_cast<double>(den);
    };
    crit.expect(std::abs(pct(cost.luts, cap.luts) - r.luts) < 0.1,
                std::string(kernel_name(r.kind)) + " LUT%");
    crit.expect(std::abs(pct(cost.brams, cap.brams) - r.brams) < 0.1,
                std::string(kernel_name(r.kind)) + " BRAM%");
    crit.expect(std::abs(pct(cost.dsps, cap.dsps) - r.dsps) < 0.1,
                std::string(kernel_name(r.kind)) + " DSP%");
  }
  ClusterDesc over = load_config_file(std::string(TEST_DATA_DIR) +
                                      "/overbudget-jacobi.json");
  auto violations = validate_resources(over);
  crit.expect(violations.size() == 1 && violations[0].resource == "luts",
              "quad jacobi should overflow LUTs");
  CHECK(crit.ok);
}

TEST_CASE("criterion 10: determinism of artifacts") {
  Criterion crit(
      "criterion 10: repeating the reporting flow yields byte-identical "
      "artifacts");
  auto produce = [&] {
    ClusterDesc full = cluster_file("ring6-laplace2d.json");
    Grid input = testutil::random_grid({2, 128, 64, 1}, 21);
    StencilKernel k = StencilKernel::defaults(KernelKind::laplace2d);
    std::vector<ExperimentRecord> records;
    std::string plan, conf, graph, trace, summary;
    for (uint32_t F = 1; F <= 3; ++F) {
      ClusterDesc c = restrict_cluster(full, F);
      RunArtifacts run = simulate_chain(c, k, input, 24, /*trace=*/true);
      ExperimentRecord r;
      r.kernel = k.kind;
      r.dims = input.dims;
      r.iterations = 24;
      r.fpgas = F;
      r.ips_per_fpga = 4;
      r.elapsed_s = run.result.elapsed_s;
      r.gflops = compute_gflops(k, input.dims, 24, run.result.elapsed_s);
      records.push_back(r);
      plan = run.plan_json;
      conf = run.conf_text;
      graph = run.graph_json;
      trace = trace_csv(run.result.trace);
      summary = sim_summary_json(run.result);
    }
    compute_speedup(records, 0);
    ChartSpec spec;
    spec.title = "laplace2d speedup";
    return records_csv(records) + "\n--\n" + records_svg(records, spec) +
           "\n--\n" + plan + conf + graph + trace + summary;
  };
  std::string a = produce();
  std::string b = produce();
  crit.expect(a == b, "artifact bytes differ between runs");
  CHECK(crit.ok);
}
