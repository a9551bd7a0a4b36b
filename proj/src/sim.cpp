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

#include "fabric/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <queue>

#include "json.hpp"

#include "fabric/error.hpp"
#include "fabric/ip_pipeline.hpp"
#include "fabric/mac_frame.hpp"

namespace fabric {

double transfer_time(uint64_t bytes, const LinkModel& link) {
  if (bytes == 0) throw SimError("transfer of zero bytes");
  if (link.bytes_per_sec <= 0) throw SimError("link bandwidth must be positive");
  double frames = 1.0;
  if (link.max_payload_bytes > 0)
    frames = std::ceil(static_cast<double>(bytes) / link.max_payload_bytes);
  return link.latency_s +
         (static_cast<double>(bytes) + frames * link.frame_overhead_bytes) /
             link.bytes_per_sec;
}

namespace {

using Ps = uint64_t;  // simulation time, integer picoseconds

Ps ceil_div(unsigned __int128 num, uint64_t den) {
  return static_cast<Ps>((num + den - 1) / den);
}

Ps bytes_ps(uint64_t bytes, uint64_t bytes_per_sec) {
  return ceil_div(static_cast<unsigned __int128>(bytes) *
                      1'000'000'000'000ull,
                  bytes_per_sec);
}

Ps cycles_ps(uint64_t cycles, uint64_t clock_hz) {
  return ceil_div(static_cast<unsigned __int128>(cycles) *
                      1'000'000'000'000ull,
                  clock_hz);
}

double to_s(Ps t) { return static_cast<double>(t) * 1e-12; }

/// First/last beat times of a stream at some point in the fabric.
struct FL {
  Ps f = 0;
  Ps l = 0;
};

struct Segment {
  enum class Kind { ingress, edge, egress };
  Kind kind = Kind::ingress;
  const Route* route = nullptr;
  std::string buffer;
  TaskId producer = 0;
  bool has_producer = false;
  TaskId consumer = 0;
  bool has_consumer = false;
  uint32_t start_wave = 0;
  uint32_t end_wave = 0;
  bool inter_wave = false;
  std::size_t park_hop = 0;  // index of the parking FIFO hop
};

struct TaskState {
  bool input_ready = false;
  FL in_fl;
  Grid in_grid;
  std::size_t ctrl_pending = 0;
  Ps ctrl_max_l = 0;
  bool scheduled = false;
  bool done = false;
  FL out_fl;
  Grid out_grid;
};

struct Event {
  Ps t = 0;
  uint64_t seq = 0;
  enum class Kind { seg_start, seg_resume, task_run } kind = Kind::seg_start;
  std::size_t idx = 0;
  FL fl;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return a.t != b.t ? a.t > b.t : a.seq > b.seq;
  }
};

std::vector<uint8_t> grid_wire_bytes(const Grid& g) {
  const std::size_t beats = (g.data.size() + kPeCount - 1) / kPeCount;
  std::vector<uint8_t> bytes(beats * kBeatBytes, 0);
  std::memcpy(bytes.data(), g.data.data(), g.data.size() * sizeof(float));
  return bytes;
}

class Engine {
 public:
  Engine(const TaskGraph& graph, const Placement& placement,
         const RouteTable& routes, const std::map<std::string, Grid>& buffers,
         const ClusterDesc& cluster, const SimParams& params)
      : graph_(graph),
        placement_(placement),
        host_buffers_(buffers),
        cluster_(cluster),
        params_(params),
        clock_(cluster.clock_hz) {
    build_segments(routes);
    build_tasks();
  }

  SimResult run();

 private:
  void build_segments(const RouteTable& routes);
  void build_tasks();
  void schedule(Ps t, Event::Kind kind, std::size_t idx, FL fl);
  void run_segment(std::size_t idx, FL fl, bool resumed);
  void run_task(TaskId id, FL fl);
  void try_schedule_task(TaskId id);
  void complete(uint32_t wave, Ps t);
  void open_next_wave();
  void deliver(const Segment& seg, FL fl, Grid grid);

  FL stage(const std::string& key, const std::string& busy_key, FL in, Ps ser,
           Ps lat, uint64_t traced_bytes, const char* event);
  FL walk_hops(const Segment& seg, std::span<const Hop> hops, FL fl,
               std::vector<uint8_t>& payload);

  Ps hop_lat_ps() const { return cycles_ps(params_.hop_latency_cycles, clock_); }
  Ps beat_cycles_ps(uint64_t bytes) const {
    return cycles_ps((bytes + kBeatBytes - 1) / kBeatBytes, clock_);
  }

  const LinkDesc& find_link(const Hop& h) const;
  StencilKernel task_kernel(TaskId id) const;

  const TaskGraph& graph_;
  const Placement& placement_;
  const std::map<std::string, Grid>& host_buffers_;
  const ClusterDesc& cluster_;
  const SimParams& params_;
  uint64_t clock_;

  std::vector<Segment> segments_;
  std::vector<std::size_t> seg_in_of_task_;   // per task, index+1 (0 = none)
  std::vector<std::vector<std::size_t>> segs_out_of_task_;
  std::vector<TaskState> tasks_;
  std::vector<std::vector<TaskId>> ctrl_consumers_;

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  uint64_t next_seq_ = 0;

  std::map<std::string, Ps> free_until_;
  std::map<std::string, Ps> busy_;
  std::vector<uint32_t> wave_pending_;
  std::vector<std::pair<std::size_t, FL>> parked_;  // segment idx + park FL
  uint32_t current_wave_ = 0;
  Ps done_max_ = 0;
  Ps fabric_first_ = std::numeric_limits<Ps>::max();
  Ps fabric_last_ = 0;

  SimResult result_;
};

void Engine::build_segments(const RouteTable& routes) {
  const std::size_t n = graph_.nodes.size();
  seg_in_of_task_.assign(n, 0);
  segs_out_of_task_.assign(n, {});
  wave_pending_.assign(placement_.waves + 1, 0);

  auto bump = [&](uint32_t wave) {
    if (wave >= wave_pending_.size()) wave_pending_.resize(wave + 1, 0);
    wave_pending_[wave]++;
  };
  auto task_wave = [&](TaskId t) { return placement_.of(t).wave; };

  for (const HostRoute& r : routes.ingress) {
    Segment s;
    s.kind = Segment::Kind::ingress;
    s.route = &r.route;
    s.buffer = r.buffer;
    s.consumer = r.task;
    s.has_consumer = true;
    s.start_wave = s.end_wave = task_wave(r.task);
    segments_.push_back(s);
    seg_in_of_task_[r.task] = segments_.size();
    bump(s.start_wave);
  }
  for (const EdgeRoute& r : routes.edges) {
    Segment s;
    s.kind = Segment::Kind::edge;
    s.route = &r.route;
    s.buffer = r.buffer;
    s.producer = r.producer;
    s.has_producer = true;
    s.consumer = r.consumer;
    s.has_consumer = true;
    s.start_wave = r.producer_wave;
    s.end_wave = r.consumer_wave;
    s.inter_wave = r.inter_wave;
    if (s.inter_wave) {
      for (std::size_t i = 0; i < r.route.hops.size(); ++i)
        if (r.route.hops[i].kind == HopKind::vfifo) {
          s.park_hop = i;
          break;
        }
      bump(s.start_wave);
      bump(s.end_wave);
    } else {
      bump(s.start_wave);
    }
    segments_.push_back(s);
    seg_in_of_task_[r.consumer] = segments_.size();
    segs_out_of_task_[r.producer].push_back(segments_.size() - 1);
  }
  for (const HostRoute& r : routes.egress) {
    Segment s;
    s.kind = Segment::Kind::egress;
    s.route = &r.route;
    s.buffer = r.buffer;
    s.producer = r.task;
    s.has_producer = true;
    s.start_wave = s.end_wave = task_wave(r.task);
    segments_.push_back(s);
    segs_out_of_task_[r.task].push_back(segments_.size() - 1);
    bump(s.start_wave);
  }
}

void Engine::build_tasks() {
  const std::size_t n = graph_.nodes.size();
  tasks_.assign(n, {});
  ctrl_consumers_.assign(n, {});
  for (TaskId t = 0; t < n; ++t) {
    if (seg_in_of_task_[t] == 0)
      throw SimError("task " + std::to_string(t) +
                     " has no data route feeding it");
    if (placement_.of(t).wave >= wave_pending_.size())
      wave_pending_.resize(placement_.of(t).wave + 1, 0);
    wave_pending_[placement_.of(t).wave]++;
  }
  for (const Edge& e : graph_.edges) {
    // The data edge is tracked by its segment; the rest gate task start.
    std::size_t seg = seg_in_of_task_[e.consumer];
    bool is_data = seg != 0 && segments_[seg - 1].has_producer &&
                   segments_[seg - 1].producer == e.producer &&
                   segments_[seg - 1].kind == Segment::Kind::edge;
    if (is_data) continue;
    tasks_[e.consumer].ctrl_pending++;
    ctrl_consumers_[e.producer].push_back(e.consumer);
  }
}

void Engine::schedule(Ps t, Event::Kind kind, std::size_t idx, FL fl) {
  queue_.push(Event{t, next_seq_++, kind, idx, fl});
}

FL Engine::stage(const std::string& key, const std::string& busy_key, FL in,
                 Ps ser, Ps lat, uint64_t traced_bytes, const char* event) {
  Ps f0 = std::max(in.f, free_until_[key]);
  FL out;
  out.f = f0 + lat;
  out.l = std::max(out.f + ser, in.l + lat);
  free_until_[key] = out.l;
  busy_[busy_key] += ser;
  if (busy_key != "host_dma") {
    fabric_first_ = std::min(fabric_first_, out.f);
    fabric_last_ = std::max(fabric_last_, out.l);
  }
  if (params_.record_trace)
    result_.trace.push_back({to_s(out.f), busy_key, event, traced_bytes});
  return out;
}

const LinkDesc& Engine::find_link(const Hop& h) const {
  for (const LinkDesc& l : cluster_.links)
    if (l.fpga_a == h.from && l.port_a == h.from_port && l.fpga_b == h.to &&
        l.port_b == h.to_port)
      return l;
  throw SimError("route uses a fiber that is not in the cluster: " +
                 std::to_string(h.from) + "->" + std::to_string(h.to));
}

StencilKernel Engine::task_kernel(TaskId id) const {
  const Assignment& a = placement_.of(id);
  StencilKernel k;
  k.kind = cluster_.slot(a.fpga, a.slot).kernel;
  k.coeffs = graph_.nodes.at(id).args.coeffs;
  k.laplace3d_six_point = params_.laplace3d_six_point;
  return k;
}

FL Engine::walk_hops(const Segment& seg, std::span<const Hop> hops, FL fl,
                     std::vector<uint8_t>& payload) {
  std::vector<MacFrame> frames;
  const Ps lat = hop_lat_ps();
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const Hop& h = hops[i];
    const std::string fpga = "fpga" + std::to_string(h.fpga);
    switch (h.kind) {
      case HopKind::host_dma: {
        bool tx = seg.kind == Segment::Kind::ingress;
        fl = stage(tx ? "host_dma.tx" : "host_dma.rx", "host_dma", fl,
                   bytes_ps(payload.size(), cluster_.host_link.bytes_per_sec),
                   0, payload.size(), tx ? "host_send" : "host_recv");
        result_.host_transfers++;
        break;
      }
      case HopKind::vfifo:
        fl = stage(fpga + ".vfifo", fpga + ".vfifo", fl,
                   bytes_ps(payload.size(), params_.vfifo_bytes_per_sec), lat,
                   payload.size(), "stream");
        break;
      case HopKind::switch_port: {
        std::string key = fpga + ".sw" + std::to_string(h.in_port) + ">" +
                          std::to_string(h.out_port);
        fl = stage(key, fpga + ".switch", fl, beat_cycles_ps(payload.size()),
                   lat, payload.size(), "stream");
        break;
      }
      case HopKind::mfh: {
        bool encap = i + 1 < hops.size() &&
                     hops[i + 1].kind == HopKind::net_link;
        if (encap) {
          std::size_t j = i + 1;
          while (j < hops.size() && hops[j].kind == HopKind::net_link) ++j;
          if (j >= hops.size() || hops[j].kind != HopKind::mfh)
            throw SimError("crossing without a receive-side frame handler");
          MacAddr src = cluster_.fpga(h.fpga).macs.at(h.lane);
          MacAddr dst = cluster_.fpga(hops[j].fpga).macs.at(hops[j].lane);
          frames = mfh_encap(payload, src, dst, params_.max_payload_bytes);
          result_.frames_total += frames.size();
          uint64_t wire = payload.size() + frames.size() * kMacHeaderBytes;
          fl = stage(fpga + ".mfh.tx", fpga + ".mfh", fl,
                     beat_cycles_ps(wire), lat, wire, "encap");
          payload.clear();
        } else {
          // Frames reached a board; they must be addressed to this lane.
          if (frames.empty()) throw SimError("MFH decap without frames");
          if (frames.front().dst != cluster_.fpga(h.fpga).macs.at(h.lane))
            throw SimError("misrouted frame: FPGA " + std::to_string(h.fpga) +
                           " lane " + std::to_string(h.lane) + " is not " +
                           frames.front().dst.str());
          uint64_t wire = 0;
          for (const MacFrame& f : frames) wire += f.wire_bytes();
          payload = mfh_decap(frames);
          frames.clear();
          fl = stage(fpga + ".mfh.rx", fpga + ".mfh", fl,
                     beat_cycles_ps(payload.size()), lat, wire, "decap");
        }
        break;
      }
      case HopKind::net_link: {
        const LinkDesc& link = find_link(h);
        const uint64_t bps = link.bits_per_sec / 8;
        uint64_t wire = 0;
        for (const MacFrame& f : frames) wire += f.wire_bytes();
        std::string key =
            "net" + std::to_string(h.from) + "->" + std::to_string(h.to);
        // Store-and-forward: the first frame must land before the next
        // board sees any of it.
        Ps sf = bytes_ps(frames.front().wire_bytes(), bps);
        fl = stage(key, key, fl, bytes_ps(wire, bps), lat + sf, wire, "xmit");
        result_.link_bytes[key] += wire;
        break;
      }
    }
  }
  return fl;
}

void Engine::deliver(const Segment& seg, FL fl, Grid grid) {
  if (seg.kind == Segment::Kind::egress) {
    result_.buffers[seg.buffer] = std::move(grid);
    complete(seg.end_wave, fl.l);
    return;
  }
  TaskState& ts = tasks_.at(seg.consumer);
  ts.input_ready = true;
  ts.in_fl = fl;
  ts.in_grid = std::move(grid);
  complete(seg.end_wave, fl.l);
  try_schedule_task(seg.consumer);
}

void Engine::run_segment(std::size_t idx, FL fl, bool resumed) {
  const Segment& seg = segments_[idx];
  Grid grid;
  if (seg.kind == Segment::Kind::ingress) {
    auto it = host_buffers_.find(seg.buffer);
    if (it == host_buffers_.end())
      throw SimError("no host buffer named '" + seg.buffer + "'");
    grid = it->second;
  } else {
    grid = tasks_.at(seg.producer).out_grid;
  }
  std::vector<uint8_t> payload = grid_wire_bytes(grid);

  std::span<const Hop> hops(seg.route->hops);
  if (seg.inter_wave && !resumed) {
    // First leg ends in DDR; the rest runs under the next wave's session.
    fl = walk_hops(seg, hops.subspan(0, seg.park_hop + 1), fl, payload);
    if (params_.record_trace)
      result_.trace.push_back(
          {to_s(fl.l),
           "fpga" + std::to_string(seg.route->hops[seg.park_hop].fpga) +
               ".vfifo",
           "park", payload.size()});
    parked_.push_back({idx, fl});
    complete(seg.start_wave, fl.l);
    return;
  }
  if (resumed) {
    // Read the parked stream back out of DDR.
    const Hop& park = seg.route->hops[seg.park_hop];
    const std::string fpga = "fpga" + std::to_string(park.fpga);
    fl = stage(fpga + ".vfifo", fpga + ".vfifo", fl,
               bytes_ps(payload.size(), params_.vfifo_bytes_per_sec),
               hop_lat_ps(), payload.size(), "resume");
    hops = hops.subspan(seg.park_hop + 1);
  }
  fl = walk_hops(seg, hops, fl, payload);
  deliver(seg, fl, std::move(grid));
}

void Engine::try_schedule_task(TaskId id) {
  TaskState& ts = tasks_[id];
  if (ts.scheduled || !ts.input_ready || ts.ctrl_pending > 0) return;
  ts.scheduled = true;
  FL fl = ts.in_fl;
  fl.f = std::max(fl.f, ts.ctrl_max_l);
  schedule(fl.f, Event::Kind::task_run, id, fl);
}

void Engine::run_task(TaskId id, FL fl) {
  TaskState& ts = tasks_[id];
  const Assignment& a = placement_.of(id);
  const StencilKernel kernel = task_kernel(id);
  const Dims dims = ts.in_grid.dims;

  auto beats = grid_to_beats(ts.in_grid);
  IpStreamResult ip = ip_process_stream(kernel, dims, beats);
  ts.out_grid = beats_to_grid(ip.beats, dims);

  const std::string key =
      "fpga" + std::to_string(a.fpga) + ".slot" + std::to_string(a.slot);
  Ps fill = cycles_ps(ip.fill_cycles + 1, clock_);
  Ps f0 = std::max(fl.f, free_until_[key]);
  FL out;
  out.f = f0 + fill;
  out.l = std::max(out.f + cycles_ps(beats.size() - 1, clock_),
                   fl.l + fill);
  free_until_[key] = out.l;
  busy_[key] += cycles_ps(beats.size(), clock_);
  fabric_first_ = std::min(fabric_first_, f0);
  fabric_last_ = std::max(fabric_last_, out.l);
  if (params_.record_trace)
    result_.trace.push_back(
        {to_s(out.f), key, "ip_stream", beats.size() * kBeatBytes});

  ts.done = true;
  ts.out_fl = out;
  ts.in_grid = Grid{};  // the stream moved on
  complete(a.wave, out.l);

  for (TaskId c : ctrl_consumers_[id]) {
    TaskState& cs = tasks_[c];
    cs.ctrl_pending--;
    cs.ctrl_max_l = std::max(cs.ctrl_max_l, out.l);
    try_schedule_task(c);
  }
  for (std::size_t s : segs_out_of_task_[id])
    schedule(out.f, Event::Kind::seg_start, s, out);
}

void Engine::complete(uint32_t wave, Ps t) {
  done_max_ = std::max(done_max_, t);
  if (wave >= wave_pending_.size() || wave_pending_[wave] == 0)
    throw SimError("internal: wave accounting underflow");
  wave_pending_[wave]--;
  while (current_wave_ < placement_.waves &&
         wave_pending_[current_wave_] == 0)
    open_next_wave();
}

void Engine::open_next_wave() {
  current_wave_++;
  if (current_wave_ >= placement_.waves) return;
  const Ps open = done_max_;
  if (params_.record_trace)
    result_.trace.push_back(
        {to_s(open), "conf", "wave" + std::to_string(current_wave_), 0});
  std::vector<std::pair<std::size_t, FL>> still_parked;
  for (auto& [idx, fl] : parked_) {
    if (segments_[idx].end_wave == current_wave_) {
      schedule(open, Event::Kind::seg_resume, idx, FL{open, open});
    } else {
      still_parked.push_back({idx, fl});
    }
  }
  parked_ = std::move(still_parked);
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (segments_[i].kind == Segment::Kind::ingress &&
        segments_[i].start_wave == current_wave_)
      schedule(open, Event::Kind::seg_start, i, FL{open, open});
}

SimResult Engine::run() {
  if (graph_.nodes.empty()) return std::move(result_);

  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (segments_[i].kind == Segment::Kind::ingress &&
        segments_[i].start_wave == 0)
      schedule(0, Event::Kind::seg_start, i, FL{0, 0});

  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    switch (ev.kind) {
      case Event::Kind::seg_start: run_segment(ev.idx, ev.fl, false); break;
      case Event::Kind::seg_resume: run_segment(ev.idx, ev.fl, true); break;
      case Event::Kind::task_run: run_task(static_cast<TaskId>(ev.idx), ev.fl);
        break;
    }
  }

  for (TaskId t = 0; t < tasks_.size(); ++t)
    if (!tasks_[t].done)
      throw SimError(
          "simulation deadlock: task " + std::to_string(t) + " on fpga" +
          std::to_string(placement_.of(t).fpga) + ".slot" +
          std::to_string(placement_.of(t).slot) +
          (tasks_[t].input_ready ? " blocked on dependencies"
                                 : " never received its input stream"));

  result_.elapsed_s = to_s(done_max_);
  if (fabric_first_ != std::numeric_limits<Ps>::max())
    result_.fabric_active_s = to_s(fabric_last_ - fabric_first_);
  for (const auto& [k, v] : busy_) result_.busy_s[k] = to_s(v);
  std::stable_sort(result_.trace.begin(), result_.trace.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     return a.time_s < b.time_s;
                   });
  return std::move(result_);
}

}  // namespace

SimResult simulate(const TaskGraph& graph, const Placement& placement,
                   const RouteTable& routes,
                   const std::vector<ConfWrite>& conf_writes,
                   const std::map<std::string, Grid>& host_buffers,
                   const ClusterDesc& cluster, const SimParams& params) {
  if (placement.assignments.size() != graph.nodes.size())
    throw SimError("plan does not cover the task graph");
  // The write list is part of the plan contract even though routing here
  // follows the hop lists; reject a plan with no programming when routes
  // exist.
  if (!routes.ingress.empty() && conf_writes.empty())
    throw SimError("plan has routes but no CONF programming");
  Engine engine(graph, placement, routes, host_buffers, cluster, params);
  return engine.run();
}

std::string trace_csv(const std::vector<TraceEvent>& trace) {
  std::string out = "time_s,component,event,bytes\n";
  char buf[64];
  for (const TraceEvent& e : trace) {
    std::snprintf(buf, sizeof(buf), "%.12f,", e.time_s);
    out += buf;
    out += e.component + "," + e.event + "," + std::to_string(e.bytes) + "\n";
  }
  return out;
}

std::string sim_summary_json(const SimResult& r) {
  nlohmann::json j;
  j["elapsed_s"] = r.elapsed_s;
  j["fabric_active_s"] = r.fabric_active_s;
  j["host_transfers"] = r.host_transfers;
  j["frames_total"] = r.frames_total;
  j["busy_s"] = r.busy_s;
  j["link_bytes"] = r.link_bytes;
  nlohmann::json buffers = nlohmann::json::object();
  for (const auto& [name, g] : r.buffers)
    buffers[name] = {{"dims", g.dims.str()}, {"cells", g.data.size()}};
  j["buffers"] = buffers;
  return j.dump(2) + "\n";
}

}  // namespace fabric
