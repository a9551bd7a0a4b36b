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

#include "fabric/mac_frame.hpp"
#include "fabric/stencil.hpp"
#include "fabric/variant_registry.hpp"

namespace fabric {

// On-chip stream switch port plan. The host and FIFO paths take one port
// each; the MAC frame handler exposes one full-duplex lane per SFP cage
// (streams are addressed lane-to-lane, so concurrent transfers stay
// apart); IP slots occupy the rest.
constexpr uint32_t kPortHost = 0;     // DMA/PCIe side, via the virtual FIFO
constexpr uint32_t kPortVfifo = 1;    // DDR-backed FIFO loop port
constexpr uint32_t kPortNetBase = 2;  // lanes 0..3 at ports 2..5
constexpr uint32_t kNetLanes = 4;
constexpr uint32_t kPortIpBase = kPortNetBase + kNetLanes;
constexpr uint32_t kSwitchPorts = 16;

/// SFP cages per board; one MAC address and one NET lane each.
constexpr uint32_t kNetPorts = kNetLanes;

struct ResourceVec {
  uint64_t luts = 0;
  uint64_t brams = 0;
  uint64_t dsps = 0;
  bool operator==(const ResourceVec&) const = default;
};

/// Free-region capacity sized so the catalog costs land on the
/// reference per-IP utilization percentages.
constexpr ResourceVec kDefaultCapacity{161840, 1083, 3564};

struct IpSlot {
  uint32_t slot_id = 0;       // position within the board's slot list
  KernelKind kernel = KernelKind::laplace2d;
  uint32_t switch_port = kPortIpBase;
  ResourceVec cost;
  bool operator==(const IpSlot&) const = default;
};

struct FpgaDesc {
  uint32_t id = 0;            // ring distance from the host
  std::string bitstream_path;
  std::vector<MacAddr> macs;  // one per wired SFP port
  std::vector<IpSlot> ips;
  ResourceVec capacity = kDefaultCapacity;
  bool operator==(const FpgaDesc&) const = default;
};

/// One fiber, carrying frames from (fpga_a, port_a) to (fpga_b, port_b).
/// A ring lists one fiber per forward hop; traffic headed backward rides
/// the ring around, and a two-board setup wires a second fiber for the
/// return direction.
struct LinkDesc {
  uint32_t fpga_a = 0;
  uint32_t port_a = 0;
  uint32_t fpga_b = 0;
  uint32_t port_b = 0;
  uint64_t bits_per_sec = kDefaultLinkBits;
  bool operator==(const LinkDesc&) const = default;

  /// Default keeps the fiber at the switch stream rate (32 B/cycle at
  /// 200 MHz) so the fabric, not the link, paces a multi-board wave.
  static constexpr uint64_t kDefaultLinkBits = 51'200'000'000ull;
};

struct HostLink {
  uint32_t gen = 3;
  uint32_t lanes = 8;
  uint64_t bytes_per_sec = kGen3Bytes;
  bool operator==(const HostLink&) const = default;

  static constexpr uint64_t kGen3Bytes = 7'880'000'000ull;
  static constexpr uint64_t kGen1Bytes = 1'600'000'000ull;  // degraded testbed
};

struct CatalogEntry {
  std::string base_name;
  std::string variant_name;
  ResourceVec cost;
  bool operator==(const CatalogEntry&) const = default;
};

enum class Topology { ring, custom };

struct ClusterDesc {
  std::vector<FpgaDesc> fpgas;
  std::vector<LinkDesc> links;
  HostLink host_link;
  std::map<KernelKind, CatalogEntry> ip_catalog;
  uint64_t clock_hz = 200'000'000;
  Topology topology = Topology::ring;
  bool operator==(const ClusterDesc&) const = default;

  const FpgaDesc& fpga(uint32_t id) const;
  const IpSlot& slot(uint32_t fpga_id, uint32_t slot_id) const;
  std::size_t total_slots() const;
};

/// Per-kernel default costs and do_*/hw_* names.
std::map<KernelKind, CatalogEntry> default_ip_catalog();

/// Variant registry built from the cluster's IP catalog: each kernel gets
/// its cpu base plus the hardware variant matched on the vc709 tag.
VariantRegistry catalog_registry(const ClusterDesc& cluster);

/// Parses and fully validates a cluster description document (JSON).
/// Unknown keys are rejected; defaults fill capacity, host link, catalog
/// and clock.
ClusterDesc load_config(const std::string& text);
ClusterDesc load_config_file(const std::string& path);

/// Inverse of load_config up to field order; load(serialize(c)) == c.
std::string serialize_config(const ClusterDesc& cluster);

struct ResourceViolation {
  uint32_t fpga = 0;
  std::string resource;
  uint64_t used = 0;
  uint64_t capacity = 0;
  std::string str() const;
};

/// Per-board sum of slot costs against capacity, every dimension. Empty
/// result means the budget holds.
std::vector<ResourceViolation> validate_resources(const ClusterDesc& cluster);

/// First `fpga_count` boards with the ring re-closed and at most
/// `ips_per_fpga` slots each; 0 keeps all slots. Used by sweep runs.
ClusterDesc restrict_cluster(const ClusterDesc& cluster, uint32_t fpga_count,
                             uint32_t ips_per_fpga = 0);

}  // namespace fabric
