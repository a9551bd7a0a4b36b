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

#include "fabric/mac_frame.hpp"

#include <cstdio>

#include "fabric/error.hpp"

namespace fabric {

MacAddr MacAddr::parse(const std::string& text) {
  MacAddr mac;
  unsigned b[6];
  char tail = 0;
  int n = std::sscanf(text.c_str(), "%2x:%2x:%2x:%2x:%2x:%2x%c", &b[0], &b[1],
                      &b[2], &b[3], &b[4], &b[5], &tail);
  if (n != 6) throw ConfigError("bad MAC address: '" + text + "'");
  for (int i = 0; i < 6; ++i) mac.bytes[i] = static_cast<uint8_t>(b[i]);
  return mac;
}

std::string MacAddr::str() const {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0],
                bytes[1], bytes[2], bytes[3], bytes[4], bytes[5]);
  return buf;
}

std::vector<MacFrame> mfh_encap(std::span<const uint8_t> payload,
                                const MacAddr& src, const MacAddr& dst,
                                std::size_t max_payload) {
  if (payload.empty()) throw SimError("cannot frame an empty payload");
  if (max_payload < 32 || max_payload > 0xFFFF)
    throw SimError("max frame payload must be in [32, 65535], got " +
                   std::to_string(max_payload));
  std::vector<MacFrame> frames;
  frames.reserve((payload.size() + max_payload - 1) / max_payload);
  for (std::size_t off = 0; off < payload.size(); off += max_payload) {
    std::size_t n = std::min(max_payload, payload.size() - off);
    MacFrame f;
    f.dst = dst;
    f.src = src;
    f.type_length = static_cast<uint16_t>(n);
    f.payload.assign(payload.begin() + off, payload.begin() + off + n);
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<uint8_t> mfh_decap(std::span<const MacFrame> frames) {
  if (frames.empty()) throw SimError("no frames to reassemble");
  std::vector<uint8_t> payload;
  const MacAddr& dst = frames.front().dst;
  const MacAddr& src = frames.front().src;
  for (const MacFrame& f : frames) {
    if (f.dst != dst || f.src != src)
      throw SimError("interleaved foreign MAC pair in frame stream");
    if (f.payload.empty()) throw SimError("empty frame payload");
    if (f.type_length != f.payload.size())
      throw SimError("frame length field mismatch: header says " +
                     std::to_string(f.type_length) + ", payload has " +
                     std::to_string(f.payload.size()));
    payload.insert(payload.end(), f.payload.begin(), f.payload.end());
  }
  return payload;
}

}  // namespace fabric
