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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fabric/cluster.hpp"
#include "fabric/error.hpp"
#include "fabric/grid.hpp"
#include "fabric/metrics.hpp"
#include "fabric/placement.hpp"
#include "fabric/sim.hpp"
#include "fabric/stencil.hpp"
#include "fabric/task_graph.hpp"
#include "fabric/variant_registry.hpp"

namespace fs = std::filesystem;
using namespace fabric;

namespace {

// Exit codes are a stable contract for scripts driving this tool.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSimulation = 2;
constexpr int kExitEquivalence = 3;

class EquivalenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dims parse_dims(const std::string& text) {
  Dims d;
  unsigned h = 0, w = 0, dd = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%ux%ux%u%c", &h, &w, &dd, &tail) == 3) {
    d = Dims{3, h, w, dd};
  } else if (std::sscanf(text.c_str(), "%ux%u%c", &h, &w, &tail) == 2) {
    d = Dims{2, h, w, 1};
  } else {
    throw ConfigError("bad grid size '" + text + "', expected HxW or HxWxD");
  }
  return d;
}

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Grid make_grid(const Dims& dims, const std::string& pattern, uint64_t seed) {
  Grid g = Grid::zeros(dims);
  if (pattern == "ones") {
    for (float& v : g.data) v = 1.0f;
  } else if (pattern == "impulse") {
    g.at(dims.h / 2, dims.w / 2, dims.rank == 3 ? dims.d / 2 : 0) = 4.0f;
  } else if (pattern == "random") {
    uint64_t state = seed;
    for (float& v : g.data) {
      uint32_t bits =
          0x3f800000u | static_cast<uint32_t>(splitmix64(state) & 0x7fffffu);
      float f;
      __builtin_memcpy(&f, &bits, 4);
      v = f;
    }
  } else {
    throw ConfigError("unknown grid pattern '" + pattern + "'");
  }
  return g;
}

StencilKernel make_kernel(const std::string& name,
                          const std::vector<float>& coeffs,
                          bool six_point) {
  KernelKind kind = kernel_from_name(name);
  StencilKernel k = StencilKernel::defaults(kind);
  if (!coeffs.empty()) k.coeffs = coeffs;
  k.laplace3d_six_point = six_point;
  k.validate();
  return k;
}

std::string default_config_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FPGA_FABRIC_CONFIG")) return env;
  throw ConfigError(
      "no cluster config: pass --config or set FPGA_FABRIC_CONFIG");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

struct SweepPoint {
  uint32_t fpgas = 0;
  uint32_t ips = 0;  // 0 keeps the config's slot count
  uint32_t iterations = 0;
};

struct RunOptions {
  std::string kernel = "laplace2d";
  std::string grid = "256x64";
  uint32_t iterations = 24;
  std::string config_path;
  std::string sweep;
  uint32_t fpgas = 0;  // 0 = all from config
  uint32_t ips = 0;
  std::string pcie;
  uint64_t clock_hz = 0;
  std::string pattern = "random";
  uint64_t seed = 1;
  std::vector<float> coeffs;
  bool laplace3d_six_point = false;
  uint32_t hop_latency = 4;
  uint32_t max_payload = 1500;
  std::string out_dir = "out";
  bool dump_graph = false;
  bool dump_plan = false;
  bool dump_trace = false;
};

std::vector<SweepPoint> sweep_points(const RunOptions& opt,
                                     uint32_t config_fpgas) {
  const uint32_t base_f = opt.fpgas ? opt.fpgas : config_fpgas;
  SweepPoint base{base_f, opt.ips, opt.iterations};
  if (opt.sweep.empty()) return {base};

  auto eq = opt.sweep.find('=');
  if (eq == std::string::npos)
    throw ConfigError("bad --sweep, expected axis=values");
  const std::string axis = opt.sweep.substr(0, eq);
  const std::string values = opt.sweep.substr(eq + 1);

  std::vector<uint32_t> nums;
  auto range = values.find("..");
  if (range != std::string::npos) {
    uint32_t lo = std::stoul(values.substr(0, range));
    uint32_t hi = std::stoul(values.substr(range + 2));
    if (lo == 0 || hi < lo) throw ConfigError("bad sweep range " + values);
    for (uint32_t v = lo; v <= hi; ++v) nums.push_back(v);
  } else {
    std::string v;
    std::istringstream in(values);
    while (std::getline(in, v, ',')) nums.push_back(std::stoul(v));
    if (nums.empty()) throw ConfigError("empty sweep list");
  }

  std::vector<SweepPoint> points;
  for (uint32_t v : nums) {
    SweepPoint p = base;
    if (axis == "fpgas")
      p.fpgas = v;
    else if (axis == "ips")
      p.ips = v;
    else if (axis == "iters" || axis == "iterations")
      p.iterations = v;
    else
      throw ConfigError("unknown sweep axis '" + axis + "'");
    points.push_back(p);
  }
  return points;
}

struct PointOutcome {
  ExperimentRecord record;
  Grid egress;
  std::string summary;
  std::string graph_json;
  std::string plan_json;
  std::string conf_text;
  std::string trace;
};

PointOutcome run_point(const ClusterDesc& base_cluster,
                       const StencilKernel& kernel, const Dims& dims,
                       const Grid& input, const SweepPoint& pt,
                       const RunOptions& opt) {
  PointOutcome out;
  out.record.kernel = kernel.kind;
  out.record.dims = dims;
  out.record.iterations = pt.iterations;
  out.record.fpgas = pt.fpgas;

  ClusterDesc cluster = restrict_cluster(base_cluster, pt.fpgas, pt.ips);
  out.record.ips_per_fpga =
      static_cast<uint32_t>(cluster.fpgas.front().ips.size());

  if (pt.iterations == 0) {  // nothing to offload
    out.egress = input;
    out.record.elapsed_s = 0;
    out.record.gflops = 0;
    out.record.speedup = 1.0;
    return out;
  }

  TaskGraph graph =
      build_pipeline_graph(kernel, "V", dims, pt.iterations,
                           cluster.ip_catalog.at(kernel.kind).base_name);
  Placement placement = map_tasks(graph, cluster, catalog_registry(cluster));
  RouteTable routes = infer_routes(graph, placement, cluster);
  auto writes = gen_conf_writes(graph, placement, routes, cluster);

  SimParams params;
  params.hop_latency_cycles = opt.hop_latency;
  params.max_payload_bytes = opt.max_payload;
  params.laplace3d_six_point = kernel.laplace3d_six_point;
  params.record_trace = opt.dump_trace;

  SimResult result = simulate(graph, placement, routes, writes, {{"V", input}},
                              cluster, params);

  Grid oracle = run_iterations(kernel, input, pt.iterations);
  if (!result.buffers.count("V") ||
      !bitwise_equal(result.buffers.at("V"), oracle))
    throw EquivalenceFailure(
        "simulated egress differs from the software result (kernel " +
        std::string(kernel_name(kernel.kind)) + ", " +
        std::to_string(pt.fpgas) + " FPGAs)");

  out.egress = result.buffers.at("V");
  out.summary = sim_summary_json(result);
  out.record.elapsed_s = result.elapsed_s;
  out.record.gflops =
      compute_gflops(kernel, dims, pt.iterations, result.elapsed_s);
  if (opt.dump_graph) out.graph_json = graph_to_json(graph);
  if (opt.dump_plan) {
    out.plan_json = plan_to_json(placement, routes);
    out.conf_text = conf_writes_text(writes);
  }
  if (opt.dump_trace) out.trace = trace_csv(result.trace);
  return out;
}

int cmd_run(const RunOptions& opt) {
  ClusterDesc cluster = load_config_file(default_config_path(opt.config_path));
  if (!opt.pcie.empty()) {
    if (opt.pcie == "gen1") {
      cluster.host_link.gen = 1;
      cluster.host_link.bytes_per_sec = HostLink::kGen1Bytes;
    } else if (opt.pcie == "gen3") {
      cluster.host_link.gen = 3;
      cluster.host_link.bytes_per_sec = HostLink::kGen3Bytes;
    } else {
      throw ConfigError("unknown --pcie preset '" + opt.pcie + "'");
    }
  }
  if (opt.clock_hz) cluster.clock_hz = opt.clock_hz;

  StencilKernel kernel =
      make_kernel(opt.kernel, opt.coeffs, opt.laplace3d_six_point);
  Dims dims = parse_dims(opt.grid);
  if (kernel_rank(kernel.kind) != dims.rank)
    throw ConfigError("kernel " + opt.kernel + " needs a rank-" +
                      std::to_string(kernel_rank(kernel.kind)) + " grid");
  Grid input = make_grid(dims, opt.pattern, opt.seed);

  auto points =
      sweep_points(opt, static_cast<uint32_t>(cluster.fpgas.size()));

  // Sweep points are independent simulations; run them concurrently and
  // write artifacts in order afterwards.
  std::vector<std::future<PointOutcome>> futures;
  for (const SweepPoint& pt : points)
    futures.push_back(std::async(std::launch::async, [&, pt] {
      return run_point(cluster, kernel, dims, input, pt, opt);
    }));
  std::vector<PointOutcome> outcomes;
  for (auto& f : futures) outcomes.push_back(f.get());

  std::vector<ExperimentRecord> records;
  for (const PointOutcome& o : outcomes) records.push_back(o.record);
  const bool timed = records.front().iterations > 0;
  if (timed) compute_speedup(records, 0);

  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  write_text(out / "results.csv", records_csv(records));

  ChartSpec speedup_spec, gflops_spec;
  SweepAxis axis = SweepAxis::fpgas;
  ChartSpec::Series series = ChartSpec::Series::kernel;
  if (opt.sweep.rfind("ips", 0) == 0) {
    axis = SweepAxis::ips;
    series = ChartSpec::Series::iterations;
  } else if (opt.sweep.rfind("iter", 0) == 0) {
    axis = SweepAxis::iterations;
    series = ChartSpec::Series::ips;
  }
  speedup_spec.x = gflops_spec.x = axis;
  speedup_spec.series = gflops_spec.series = series;
  speedup_spec.y = Metric::speedup;
  speedup_spec.title = std::string(kernel_name(kernel.kind)) + " speedup";
  gflops_spec.y = Metric::gflops;
  gflops_spec.title = std::string(kernel_name(kernel.kind)) + " GFLOPS";
  if (timed) {
    write_text(out / "speedup.svg", records_svg(records, speedup_spec));
    write_text(out / "gflops.svg", records_svg(records, gflops_spec));
  }

  const PointOutcome& last = outcomes.back();
  save_grid(last.egress, (out / "egress.grd").string());
  if (!last.summary.empty()) write_text(out / "summary.json", last.summary);
  if (opt.dump_graph) write_text(out / "graph.json", last.graph_json);
  if (opt.dump_plan) {
    write_text(out / "plan.json", last.plan_json);
    write_text(out / "conf_writes.txt", last.conf_text);
  }
  if (opt.dump_trace) write_text(out / "trace.csv", last.trace);

  for (const ExperimentRecord& r : records)
    std::printf("%s %ux%ux%u iters=%u fpgas=%u ips=%u elapsed=%.6es "
                "gflops=%.4f speedup=%.3f\n",
                kernel_name(r.kernel), r.dims.h, r.dims.w, r.dims.d,
                r.iterations, r.fpgas, r.ips_per_fpga, r.elapsed_s, r.gflops,
                r.speedup);
  std::printf("wrote %s\n", (out / "results.csv").c_str());
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  ClusterDesc c = load_config_file(path);
  std::size_t total_ips = c.total_slots();
  std::printf("%zu FPGAs, %zu IPs, %s\n", c.fpgas.size(), total_ips,
              c.topology == Topology::ring ? "ring OK" : "custom topology");
  std::printf("host link: gen%u x%u, %.3g bytes/s\n", c.host_link.gen,
              c.host_link.lanes,
              static_cast<double>(c.host_link.bytes_per_sec));
  std::printf("clock: %.0f MHz\n", static_cast<double>(c.clock_hz) / 1e6);
  for (const FpgaDesc& f : c.fpgas) {
    ResourceVec used;
    for (const IpSlot& s : f.ips) {
      used.luts += s.cost.luts;
      used.brams += s.cost.brams;
      used.dsps += s.cost.dsps;
    }
    std::printf(
        "fpga %u: %zu IPs | LUT %6lu/%lu (%5.1f%%) | BRAM %4lu/%lu (%5.1f%%) "
        "| DSP %4lu/%lu (%5.1f%%)\n",
        f.id, f.ips.size(), used.luts, f.capacity.luts,
        100.0 * static_cast<double>(used.luts) /
            static_cast<double>(f.capacity.luts),
        used.brams, f.capacity.brams,
        100.0 * static_cast<double>(used.brams) /
            static_cast<double>(f.capacity.brams),
        used.dsps, f.capacity.dsps,
        100.0 * static_cast<double>(used.dsps) /
            static_cast<double>(f.capacity.dsps));
  }
  auto violations = validate_resources(c);
  for (const ResourceViolation& v : violations)
    std::printf("violation: %s\n", v.str().c_str());
  if (!violations.empty()) return kExitValidation;
  std::printf("resource budget OK\n");
  return kExitOk;
}

struct OracleOptions {
  std::string kernel = "laplace2d";
  uint32_t iterations = 1;
  std::string in_path;
  std::string gen;
  std::string pattern = "random";
  uint64_t seed = 1;
  std::string out_path = "oracle.grd";
  std::vector<float> coeffs;
  bool laplace3d_six_point = false;
};

int cmd_oracle(const OracleOptions& opt) {
  StencilKernel kernel =
      make_kernel(opt.kernel, opt.coeffs, opt.laplace3d_six_point);
  Grid input;
  if (!opt.in_path.empty())
    input = load_grid(opt.in_path);
  else if (!opt.gen.empty())
    input = make_grid(parse_dims(opt.gen), opt.pattern, opt.seed);
  else
    throw ConfigError("oracle needs --in FILE or --gen HxW[xD]");
  Grid out = run_iterations(kernel, input, opt.iterations);
  save_grid(out, opt.out_path);
  std::printf("wrote %s (%s, %u iterations)\n", opt.out_path.c_str(),
              out.dims.str().c_str(), opt.iterations);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task offloading simulator for stencil pipelines on a ring of "
               "FPGA boards"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd =
      app.add_subcommand("run", "plan, simulate and report a kernel run");
  run_cmd->add_option("--kernel", run.kernel, "stencil kernel name");
  run_cmd->add_option("--grid", run.grid, "grid size HxW or HxWxD");
  run_cmd->add_option("--iters", run.iterations, "offloaded task count");
  run_cmd->add_option("--config", run.config_path,
                      "cluster config (or FPGA_FABRIC_CONFIG)");
  run_cmd->add_option("--sweep", run.sweep,
                      "axis sweep: fpgas=1..6 | ips=1..4 | iters=a,b,c");
  run_cmd->add_option("--fpgas", run.fpgas, "boards to use (default: all)");
  run_cmd->add_option("--ips", run.ips, "IP slots per board (default: all)");
  run_cmd->add_option("--pcie", run.pcie, "host link preset: gen1|gen3");
  run_cmd->add_option("--clock-hz", run.clock_hz, "override fabric clock");
  run_cmd->add_option("--pattern", run.pattern,
                      "input fill: random|ones|impulse");
  run_cmd->add_option("--seed", run.seed, "input grid seed");
  run_cmd->add_option("--coeffs", run.coeffs, "kernel coefficients")
      ->delimiter(',');
  run_cmd->add_flag("--laplace3d-six-point", run.laplace3d_six_point,
                    "use six distinct neighbors at 1/6 for laplace3d");
  run_cmd->add_option("--hop-latency", run.hop_latency,
                      "per-hop latency in cycles");
  run_cmd->add_option("--max-payload", run.max_payload,
                      "MAC frame payload limit in bytes");
  run_cmd->add_option("--out", run.out_dir, "artifact directory");
  run_cmd->add_flag("--dump-graph", run.dump_graph, "write graph.json");
  run_cmd->add_flag("--dump-plan", run.dump_plan,
                    "write plan.json and conf_writes.txt");
  run_cmd->add_flag("--dump-trace", run.dump_trace, "write trace.csv");

  std::string validate_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a cluster config and its budget");
  validate_cmd->add_option("config", validate_path, "config file")->required();

  OracleOptions oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "run the software kernel only, for verification");
  oracle_cmd->add_option("--kernel", oracle.kernel, "stencil kernel name");
  oracle_cmd->add_option("--iters", oracle.iterations, "iterations");
  oracle_cmd->add_option("--in", oracle.in_path, "input grid file");
  oracle_cmd->add_option("--gen", oracle.gen, "generate input, HxW or HxWxD");
  oracle_cmd->add_option("--pattern", oracle.pattern,
                         "generated fill: random|ones|impulse");
  oracle_cmd->add_option("--seed", oracle.seed, "generator seed");
  oracle_cmd->add_option("--out", oracle.out_path, "output grid file");
  oracle_cmd->add_option("--coeffs", oracle.coeffs, "kernel coefficients")
      ->delimiter(',');
  oracle_cmd->add_flag("--laplace3d-six-point", oracle.laplace3d_six_point,
                       "use six distinct neighbors at 1/6 for laplace3d");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (validate_cmd->parsed()) return cmd_validate(validate_path);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle);
  } catch (const EquivalenceFailure& e) {
    std::fprintf(stderr, "equivalence failure: %s\n", e.what());
    return kExitEquivalence;
  } catch (const SimError& e) {
    std::fprintf(stderr, "simulation error: %s\n", e.what());
    return kExitSimulation;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
