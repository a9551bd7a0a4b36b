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

#include "fabric/variant_registry.hpp"

#include <algorithm>

#include "fabric/error.hpp"

namespace fabric {

std::string base_function_name(KernelKind kind) {
  return std::string("do_") + kernel_name(kind);
}

std::string hw_variant_name(KernelKind kind) {
  return std::string("hw_") + kernel_name(kind);
}

std::size_t VariantRegistry::register_variant(
    std::string base_name, std::string variant_name,
    std::set<std::string> match_ctx, VariantKind kind,
    std::optional<KernelKind> ip_kernel) {
  if (base_name.empty() || variant_name.empty())
    throw ConfigError("variant names must be non-empty");
  if (kind == VariantKind::ip_variant && !ip_kernel)
    throw ConfigError("ip variant '" + variant_name +
                      "' needs an IP catalog kernel");
  for (const VariantEntry& e : entries_) {
    if (e.base_name != base_name) continue;
    if (e.match_ctx == match_ctx)
      throw ConfigError("duplicate variant registration for '" + base_name +
                        "'");
    // Two selectable contexts of equal size could tie at resolve time;
    // reject at registration.
    if (e.kind == VariantKind::ip_variant &&
        kind == VariantKind::ip_variant &&
        e.match_ctx.size() == match_ctx.size())
      throw ConfigError("ambiguous variant specificity for '" + base_name +
                        "'");
  }
  entries_.push_back({std::move(base_name), std::move(variant_name),
                      std::move(match_ctx), kind, ip_kernel});
  return entries_.size() - 1;
}

const VariantEntry& VariantRegistry::resolve(
    const std::string& base_name,
    const std::set<std::string>& active_ctx) const {
  const VariantEntry* best = nullptr;
  const VariantEntry* cpu = nullptr;
  bool known = false;
  for (const VariantEntry& e : entries_) {
    if (e.base_name != base_name) continue;
    known = true;
    if (e.kind == VariantKind::cpu_base) {
      cpu = &e;
      continue;
    }
    if (!std::includes(active_ctx.begin(), active_ctx.end(),
                       e.match_ctx.begin(), e.match_ctx.end()))
      continue;
    if (!best || e.match_ctx.size() > best->match_ctx.size()) best = &e;
  }
  if (!known) throw ConfigError("unknown base function: " + base_name);
  if (best) return *best;
  if (cpu) return *cpu;
  throw ConfigError("no variant of '" + base_name +
                    "' matches and no cpu base is registered");
}

VariantRegistry VariantRegistry::builtin() {
  VariantRegistry r;
  for (KernelKind k : all_kernel_kinds()) {
    r.register_variant(base_function_name(k), base_function_name(k), {},
                       VariantKind::cpu_base);
    r.register_variant(base_function_name(k), hw_variant_name(k), {"vc709"},
                       VariantKind::ip_variant, k);
  }
  return r;
}

}  // namespace fabric
