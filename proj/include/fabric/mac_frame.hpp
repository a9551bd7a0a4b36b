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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fabric {

struct MacAddr {
  std::array<uint8_t, 6> bytes{};

  static MacAddr parse(const std::string& text);  // "02:00:00:00:00:01"
  std::string str() const;

  auto operator<=>(const MacAddr&) const = default;
};

/// dst(6) + src(6) + type_length(2) on the wire ahead of the payload.
constexpr std::size_t kMacHeaderBytes = 14;

/// type_length carries the payload byte count, capping frame payloads at
/// 64 KiB - 1.
struct MacFrame {
  MacAddr dst;
  MacAddr src;
  uint16_t type_length = 0;
  std::vector<uint8_t> payload;

  std::size_t wire_bytes() const { return kMacHeaderBytes + payload.size(); }
};

/// Segments a payload into frames of exactly max_payload bytes, final
/// frame excepted. Throws on an empty payload or max_payload < 32.
std::vector<MacFrame> mfh_encap(std::span<const uint8_t> payload,
                                const MacAddr& src, const MacAddr& dst,
                                std::size_t max_payload);

/// Reassembles the original payload, checking per-frame lengths and that
/// every frame carries the same src/dst pair.
std::vector<uint8_t> mfh_decap(std::span<const MacFrame> frames);

}  // namespace fabric
