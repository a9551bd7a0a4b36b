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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fabric/stencil.hpp"

namespace fabric {

enum class VariantKind { cpu_base, ip_variant };

/// One registered implementation of a base function. An ip_variant names
/// the hardware kernel it stands for; the cpu_base is the software
/// fallback used when no device context matches.
struct VariantEntry {
  std::string base_name;
  std::string variant_name;
  std::set<std::string> match_ctx;  // device-arch tags, e.g. "vc709"
  VariantKind kind = VariantKind::cpu_base;
  std::optional<KernelKind> ip_kernel;  // catalog reference, ip_variant only
};

/// Build-once registry resolving base function names to the variant whose
/// context selector matches the active device tags. Reads are const and
/// thread-safe after construction.
class VariantRegistry {
 public:
  std::size_t register_variant(std::string base_name,
                               std::string variant_name,
                               std::set<std::string> match_ctx,
                               VariantKind kind,
                               std::optional<KernelKind> ip_kernel = {});

  /// Picks the ip_variant with the largest context contained in
  /// `active_ctx`; falls back to the cpu_base when none matches.
  const VariantEntry& resolve(const std::string& base_name,
                              const std::set<std::string>& active_ctx) const;

  const std::vector<VariantEntry>& entries() const { return entries_; }

  /// Registry with the stock do_*/hw_* pairs for every stencil kernel,
  /// matched on the vc709 device tag.
  static VariantRegistry builtin();

 private:
  std::vector<VariantEntry> entries_;
};

/// Base function name conventionally paired with a kernel kind ("do_" +
/// kernel name).
std::string base_function_name(KernelKind kind);
std::string hw_variant_name(KernelKind kind);

}  // namespace fabric
