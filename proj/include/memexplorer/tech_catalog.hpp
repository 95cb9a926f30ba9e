// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace memx {

enum class MemoryKind { OnChip, OffChip };

/// One row of the memory technology registry. All values are SI internally:
/// seconds, bytes, bytes/s, watts/byte, joules/bit. Shoreline stays in
/// millimeters because it is a die-edge length budget, not a data quantity.
struct MemoryTechnology {
  std::string name;
  MemoryKind kind = MemoryKind::OffChip;
  double latency_s = 0.0;            // fixed per-transfer latency contribution
  double capacity_bytes = 0.0;       // per stack / package / die / layer
  double bandwidth_bytes_per_s = 0.0;
  std::optional<double> shoreline_mm;  // PHY edge length; off-chip only
  double p_bg_w_per_byte = 0.0;        // static background power
  double e_read_j_per_bit = 0.0;
  double e_write_j_per_bit = 0.0;
  // Unit counts a constrained design may instantiate (stack counts for
  // off-chip, bonded layers for stacked SRAM). Empty = unrestricted.
  std::vector<int> allowed_units;

  bool allows_units(int n) const;
};

/// Die-edge budget for off-chip memory PHYs. Two edges of a reticle-limited
/// die (26 mm x 33 mm) give the 66 mm default; the rest of the perimeter is
/// assumed reserved for other I/O.
struct ShorelineBudget {
  double l_mem_mm = 66.0;    // edge length available to memory
  double l_margin_mm = 1.0;  // per-stack placement margin

  void validate() const;  // throws ValidationError
};

using Catalog = std::map<std::string, MemoryTechnology>;

/// Parses a catalog document (JSON array of technology objects with
/// human-editable units: ns, GB, GB/s, mm, mW/GB, pJ/bit) and converts to SI.
/// Throws ParseError on malformed input and ValidationError when an entry
/// violates a registry invariant; both name the offending entry/field.
Catalog load_catalog(const std::string& json_text);
Catalog load_catalog_file(const std::string& path);

/// Built-in registry with the nine default technologies. Identical in
/// content to the bundled data/catalog.json.
const Catalog& default_catalog();

/// JSON text of the built-in registry (the bundled file's source of truth).
std::string default_catalog_json();

/// Maximum number of stacks of `tech` attachable under `budget`:
/// floor(l_mem / (shoreline_per_unit + l_margin)). Off-chip only; asking for
/// an on-chip technology is a domain error since it does not consume
/// shoreline.
int max_stacks(const MemoryTechnology& tech, const ShorelineBudget& budget);

}  // namespace memx
