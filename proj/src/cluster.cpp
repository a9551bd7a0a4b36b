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

#include "fabric/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fabric/error.hpp"
#include "fabric/variant_registry.hpp"

namespace fabric {

using nlohmann::json;

const FpgaDesc& ClusterDesc::fpga(uint32_t id) const {
  if (id >= fpgas.size())
    throw ConfigError("no FPGA with id " + std::to_string(id));
  return fpgas[id];
}

const IpSlot& ClusterDesc::slot(uint32_t fpga_id, uint32_t slot_id) const {
  const FpgaDesc& f = fpga(fpga_id);
  if (slot_id >= f.ips.size())
    throw ConfigError("no slot " + std::to_string(slot_id) + " on FPGA " +
                      std::to_string(fpga_id));
  return f.ips[slot_id];
}

std::size_t ClusterDesc::total_slots() const {
  std::size_t n = 0;
  for (const FpgaDesc& f : fpgas) n += f.ips.size();
  return n;
}

std::map<KernelKind, CatalogEntry> default_ip_catalog() {
  auto entry = [](KernelKind k, uint64_t luts, uint64_t brams,
                  uint64_t dsps) {
    return std::pair{k, CatalogEntry{base_function_name(k),
                                     hw_variant_name(k),
                                     ResourceVec{luts, brams, dsps}}};
  };
  return {
      entry(KernelKind::laplace2d, 12138, 8, 16),
      entry(KernelKind::diffusion2d, 25024, 8, 80),
      entry(KernelKind::jacobi9pt2d, 45733, 8, 144),
      entry(KernelKind::laplace3d, 21790, 65, 17),
      entry(KernelKind::diffusion3d, 27615, 23, 97),
  };
}

VariantRegistry catalog_registry(const ClusterDesc& cluster) {
  VariantRegistry r;
  for (const auto& [kind, e] : cluster.ip_catalog) {
    r.register_variant(e.base_name, e.base_name, {}, VariantKind::cpu_base);
    r.register_variant(e.base_name, e.variant_name, {"vc709"},
                       VariantKind::ip_variant, kind);
  }
  return r;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

uint64_t get_u64(const json& obj, const char* key, uint64_t fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_unsigned() || v.is_number_integer()) {
    auto n = v.get<int64_t>();
    if (n < 0) throw ConfigError(std::string(key) + " must be >= 0 in " + where);
    return static_cast<uint64_t>(n);
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d < 0) throw ConfigError(std::string(key) + " must be >= 0 in " + where);
    return static_cast<uint64_t>(d + 0.5);
  }
  throw ConfigError(std::string(key) + " must be a number in " + where);
}

ResourceVec parse_resources(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"luts", "brams", "dsps"}, where);
  ResourceVec r;
  r.luts = get_u64(obj, "luts", 0, where);
  r.brams = get_u64(obj, "brams", 0, where);
  r.dsps = get_u64(obj, "dsps", 0, where);
  return r;
}

json resources_json(const ResourceVec& r) {
  return {{"luts", r.luts}, {"brams", r.brams}, {"dsps", r.dsps}};
}

void check_cluster(const ClusterDesc& c) {
  if (c.fpgas.empty()) throw ConfigError("cluster needs at least one FPGA");
  if (c.clock_hz == 0) throw ConfigError("clock_hz must be positive");

  std::set<MacAddr> macs_seen;
  for (std::size_t i = 0; i < c.fpgas.size(); ++i) {
    const FpgaDesc& f = c.fpgas[i];
    const std::string where = "fpga " + std::to_string(f.id);
    if (f.id != i)
      throw ConfigError("FPGA ids must be 0..F-1 in ring order; entry " +
                        std::to_string(i) + " has id " + std::to_string(f.id));
    if (f.bitstream_path.empty())
      throw ConfigError(where + " has an empty bitstream path");
    if (f.macs.empty() || f.macs.size() > kNetPorts)
      throw ConfigError(where + " needs 1.." + std::to_string(kNetPorts) +
                        " MAC addresses");
    for (const MacAddr& m : f.macs)
      if (!macs_seen.insert(m).second)
        throw ConfigError("duplicate MAC address " + m.str());
    if (f.ips.empty())
      throw ConfigError(where + " has no IP slots");
    if (f.ips.size() > kSwitchPorts - kPortIpBase)
      throw ConfigError(where + " exceeds the switch port budget of " +
                        std::to_string(kSwitchPorts - kPortIpBase) +
                        " IP slots");
    std::set<uint32_t> ports;
    for (std::size_t s = 0; s < f.ips.size(); ++s) {
      const IpSlot& slot = f.ips[s];
      if (slot.slot_id != s)
        throw ConfigError(where + " slot ids must be 0..n-1 in order");
      if (slot.switch_port < kPortIpBase || slot.switch_port >= kSwitchPorts)
        throw ConfigError(where + " slot " + std::to_string(s) +
                          ": switch port must be in [" +
                          std::to_string(kPortIpBase) + ", " +
                          std::to_string(kSwitchPorts - 1) + "]");
      if (!ports.insert(slot.switch_port).second)
        throw ConfigError(where + ": duplicate switch port " +
                          std::to_string(slot.switch_port));
      auto cat = c.ip_catalog.find(slot.kernel);
      if (cat == c.ip_catalog.end())
        throw ConfigError(where + " slot " + std::to_string(s) +
                          ": kernel missing from ip_catalog");
      if (!(slot.cost == cat->second.cost))
        throw ConfigError(where + " slot " + std::to_string(s) +
                          ": cost differs from the ip_catalog entry for " +
                          kernel_name(slot.kernel));
    }
    if (f.capacity.luts == 0 || f.capacity.brams == 0 || f.capacity.dsps == 0)
      throw ConfigError(where + " capacity must be positive");
  }

  std::set<std::pair<uint32_t, uint32_t>> used_ports;
  for (const LinkDesc& l : c.links) {
    if (l.fpga_a >= c.fpgas.size() || l.fpga_b >= c.fpgas.size())
      throw ConfigError("link references an unknown FPGA");
    if (l.fpga_a == l.fpga_b) throw ConfigError("link connects an FPGA to itself");
    if (l.port_a >= kNetPorts || l.port_b >= kNetPorts)
      throw ConfigError("link NET ports must be in [0, " +
                        std::to_string(kNetPorts - 1) + "]");
    if (l.port_a >= c.fpgas[l.fpga_a].macs.size() ||
        l.port_b >= c.fpgas[l.fpga_b].macs.size())
      throw ConfigError("link endpoint port has no MAC address assigned");
    if (!used_ports.insert({l.fpga_a, l.port_a}).second ||
        !used_ports.insert({l.fpga_b, l.port_b}).second)
      throw ConfigError("SFP port wired into more than one link");
    if (l.bits_per_sec == 0) throw ConfigError("link bandwidth must be positive");
  }

  if (c.topology == Topology::ring && c.fpgas.size() >= 2) {
    const uint32_t F = static_cast<uint32_t>(c.fpgas.size());
    for (uint32_t k = 0; k < F; ++k) {
      const uint32_t next = (k + 1) % F;
      bool found = false;
      for (const LinkDesc& l : c.links)
        if (l.fpga_a == k && l.fpga_b == next) found = true;
      if (!found)
        throw ConfigError("broken ring: no link from FPGA " +
                          std::to_string(k) + " to FPGA " +
                          std::to_string(next));
    }
  }
}

}  // namespace

ClusterDesc load_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(
      doc, {"fpgas", "links", "host_link", "ip_catalog", "clock_hz", "topology"},
      "config root");

  ClusterDesc c;
  c.clock_hz = get_u64(doc, "clock_hz", 200'000'000, "config root");

  if (doc.contains("topology")) {
    std::string t = doc.at("topology").get<std::string>();
    if (t == "ring")
      c.topology = Topology::ring;
    else if (t == "custom")
      c.topology = Topology::custom;
    else
      throw ConfigError("topology must be 'ring' or 'custom'");
  }

  c.ip_catalog = default_ip_catalog();
  if (doc.contains("ip_catalog")) {
    for (auto it = doc.at("ip_catalog").begin(); it != doc.at("ip_catalog").end();
         ++it) {
      KernelKind kind = kernel_from_name(it.key());
      const json& e = it.value();
      const std::string where = "ip_catalog." + it.key();
      reject_unknown_keys(e, {"base", "variant", "cost"}, where);
      CatalogEntry& entry = c.ip_catalog[kind];
      if (e.contains("base")) entry.base_name = e.at("base").get<std::string>();
      if (e.contains("variant"))
        entry.variant_name = e.at("variant").get<std::string>();
      if (e.contains("cost")) entry.cost = parse_resources(e.at("cost"), where);
      if (entry.base_name.empty() || entry.variant_name.empty())
        throw ConfigError(where + ": names must be non-empty");
    }
  }

  if (!doc.contains("fpgas") || !doc.at("fpgas").is_array())
    throw ConfigError("config needs an 'fpgas' array");
  for (const json& jf : doc.at("fpgas")) {
    const std::string where = "fpgas[" + std::to_string(c.fpgas.size()) + "]";
    reject_unknown_keys(jf, {"id", "bitstream", "macs", "ips", "capacity"},
                        where);
    FpgaDesc f;
    f.id = static_cast<uint32_t>(
        get_u64(jf, "id", c.fpgas.size(), where));
    if (!jf.contains("bitstream"))
      throw ConfigError(where + " is missing 'bitstream'");
    f.bitstream_path = jf.at("bitstream").get<std::string>();
    if (!jf.contains("macs"))
      throw ConfigError(where + " is missing 'macs'");
    for (const json& jm : jf.at("macs"))
      f.macs.push_back(MacAddr::parse(jm.get<std::string>()));
    if (jf.contains("capacity"))
      f.capacity = parse_resources(jf.at("capacity"), where + ".capacity");
    if (!jf.contains("ips"))
      throw ConfigError(where + " is missing 'ips'");
    for (const json& js : jf.at("ips")) {
      const std::string swhere =
          where + ".ips[" + std::to_string(f.ips.size()) + "]";
      reject_unknown_keys(js, {"kernel", "port", "cost"}, swhere);
      IpSlot slot;
      slot.slot_id = static_cast<uint32_t>(f.ips.size());
      if (!js.contains("kernel"))
        throw ConfigError(swhere + " is missing 'kernel'");
      slot.kernel = kernel_from_name(js.at("kernel").get<std::string>());
      slot.switch_port = static_cast<uint32_t>(
          get_u64(js, "port", kPortIpBase + f.ips.size(), swhere));
      slot.cost = js.contains("cost")
                      ? parse_resources(js.at("cost"), swhere + ".cost")
                      : c.ip_catalog.at(slot.kernel).cost;
      f.ips.push_back(slot);
    }
    c.fpgas.push_back(std::move(f));
  }

  if (doc.contains("links")) {
    for (const json& jl : doc.at("links")) {
      const std::string where = "links[" + std::to_string(c.links.size()) + "]";
      reject_unknown_keys(jl, {"a", "port_a", "b", "port_b", "bits_per_sec"},
                          where);
      LinkDesc l;
      if (!jl.contains("a") || !jl.contains("b"))
        throw ConfigError(where + " needs 'a' and 'b' FPGA ids");
      l.fpga_a = static_cast<uint32_t>(get_u64(jl, "a", 0, where));
      l.fpga_b = static_cast<uint32_t>(get_u64(jl, "b", 0, where));
      l.port_a = static_cast<uint32_t>(get_u64(jl, "port_a", 0, where));
      l.port_b = static_cast<uint32_t>(get_u64(jl, "port_b", 1, where));
      l.bits_per_sec =
          get_u64(jl, "bits_per_sec", LinkDesc::kDefaultLinkBits, where);
      c.links.push_back(l);
    }
  }

  if (doc.contains("host_link")) {
    const json& jh = doc.at("host_link");
    reject_unknown_keys(jh, {"gen", "lanes", "bytes_per_sec"}, "host_link");
    c.host_link.gen = static_cast<uint32_t>(get_u64(jh, "gen", 3, "host_link"));
    c.host_link.lanes =
        static_cast<uint32_t>(get_u64(jh, "lanes", 8, "host_link"));
    uint64_t preset = c.host_link.gen == 1 ? HostLink::kGen1Bytes
                                           : HostLink::kGen3Bytes;
    c.host_link.bytes_per_sec =
        get_u64(jh, "bytes_per_sec", preset, "host_link");
    if (c.host_link.bytes_per_sec == 0)
      throw ConfigError("host link bandwidth must be positive");
  }

  check_cluster(c);
  return c;
}

ClusterDesc load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config(ss.str());
}

std::string serialize_config(const ClusterDesc& c) {
  json doc;
  doc["clock_hz"] = c.clock_hz;
  doc["topology"] = c.topology == Topology::ring ? "ring" : "custom";
  doc["host_link"] = {{"gen", c.host_link.gen},
                      {"lanes", c.host_link.lanes},
                      {"bytes_per_sec", c.host_link.bytes_per_sec}};
  doc["ip_catalog"] = json::object();
  for (const auto& [kind, e] : c.ip_catalog)
    doc["ip_catalog"][kernel_name(kind)] = {{"base", e.base_name},
                                            {"variant", e.variant_name},
                                            {"cost", resources_json(e.cost)}};
  doc["fpgas"] = json::array();
  for (const FpgaDesc& f : c.fpgas) {
    json jf;
    jf["id"] = f.id;
    jf["bitstream"] = f.bitstream_path;
    jf["macs"] = json::array();
    for (const MacAddr& m : f.macs) jf["macs"].push_back(m.str());
    jf["capacity"] = resources_json(f.capacity);
    jf["ips"] = json::array();
    for (const IpSlot& s : f.ips)
      jf["ips"].push_back({{"kernel", kernel_name(s.kernel)},
                           {"port", s.switch_port},
                           {"cost", resources_json(s.cost)}});
    doc["fpgas"].push_back(jf);
  }
  doc["links"] = json::array();
  for (const LinkDesc& l : c.links)
    doc["links"].push_back({{"a", l.fpga_a},
                            {"port_a", l.port_a},
                            {"b", l.fpga_b},
                            {"port_b", l.port_b},
                            {"bits_per_sec", l.bits_per_sec}});
  return doc.dump(2) + "\n";
}

std::string ResourceViolation::str() const {
  return "fpga " + std::to_string(fpga) + ": " + resource + " " +
         std::to_string(used) + " exceeds capacity " +
         std::to_string(capacity);
}

std::vector<ResourceViolation> validate_resources(const ClusterDesc& c) {
  std::vector<ResourceViolation> out;
  for (const FpgaDesc& f : c.fpgas) {
    ResourceVec used;
    for (const IpSlot& s : f.ips) {
      used.luts += s.cost.luts;
      used.brams += s.cost.brams;
      used.dsps += s.cost.dsps;
    }
    if (used.luts > f.capacity.luts)
      out.push_back({f.id, "luts", used.luts, f.capacity.luts});
    if (used.brams > f.capacity.brams)
      out.push_back({f.id, "brams", used.brams, f.capacity.brams});
    if (used.dsps > f.capacity.dsps)
      out.push_back({f.id, "dsps", used.dsps, f.capacity.dsps});
  }
  return out;
}

ClusterDesc restrict_cluster(const ClusterDesc& cluster, uint32_t fpga_count,
                             uint32_t ips_per_fpga) {
  if (fpga_count == 0 || fpga_count > cluster.fpgas.size())
    throw ConfigError("cannot restrict cluster to " +
                      std::to_string(fpga_count) + " FPGAs, config has " +
                      std::to_string(cluster.fpgas.size()));
  ClusterDesc c = cluster;
  c.fpgas.resize(fpga_count);
  for (FpgaDesc& f : c.fpgas) {
    if (ips_per_fpga > 0) {
      if (ips_per_fpga > f.ips.size())
        throw ConfigError("FPGA " + std::to_string(f.id) + " has only " +
                          std::to_string(f.ips.size()) + " IP slots");
      f.ips.resize(ips_per_fpga);
    }
  }
  uint64_t bits = cluster.links.empty() ? LinkDesc::kDefaultLinkBits
                                        : cluster.links.front().bits_per_sec;
  c.links.clear();
  if (fpga_count >= 2)
    for (uint32_t k = 0; k < fpga_count; ++k)
      c.links.push_back({k, 0, (k + 1) % fpga_count, 1, bits});
  check_cluster(c);
  return c;
}

}  // namespace fabric
