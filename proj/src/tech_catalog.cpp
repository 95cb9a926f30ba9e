// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/tech_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "memexplorer/errors.hpp"
#include "memexplorer/units.hpp"

namespace memx {

using nlohmann::json;

bool MemoryTechnology::allows_units(int n) const {
  if (allowed_units.empty()) return n >= 1;
  return std::find(allowed_units.begin(), allowed_units.end(), n) !=
         allowed_units.end();
}

void ShorelineBudget::validate() const {
  if (!(l_mem_mm > 0.0) || l_mem_mm > 66.0) {
    throw ValidationError("shoreline budget l_mem must be in (0, 66] mm, got " +
                          std::to_string(l_mem_mm));
  }
  if (l_margin_mm < 0.0) {
    throw ValidationError("shoreline margin must be non-negative");
  }
}

namespace {

double require_positive(const json& obj, const std::string& entry,
                        const std::string& field) {
  if (!obj.contains(field)) {
    throw ParseError("catalog entry '" + entry + "': missing field '" + field +
                     "'");
  }
  if (!obj[field].is_number()) {
    throw ParseError("catalog entry '" + entry + "': field '" + field +
                     "' must be a number");
  }
  double v = obj[field].get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError("catalog entry '" + entry + "': field '" + field +
                          "' must be strictly positive");
  }
  return v;
}

MemoryTechnology parse_entry(const json& obj) {
  if (!obj.is_object()) throw ParseError("catalog entry must be an object");
  if (!obj.contains("name") || !obj["name"].is_string()) {
    throw ParseError("catalog entry: missing string field 'name'");
  }
  MemoryTechnology t;
  t.name = obj["name"].get<std::string>();

  if (!obj.contains("kind") || !obj["kind"].is_string()) {
    throw ParseError("catalog entry '" + t.name +
                     "': missing string field 'kind'");
  }
  const std::string kind = obj["kind"].get<std::string>();
  if (kind == "onchip") {
    t.kind = MemoryKind::OnChip;
  } else if (kind == "offchip") {
    t.kind = MemoryKind::OffChip;
  } else {
    throw ParseError("catalog entry '" + t.name + "': kind must be 'onchip' or 'offchip', got '" + kind + "'");
  }

  t.latency_s = require_positive(obj, t.name, "latency_ns") * units::kNanoseconds;
  t.capacity_bytes = require_positive(obj, t.name, "capacity_gb") * units::kGiga;
  t.bandwidth_bytes_per_s =
      require_positive(obj, t.name, "bandwidth_gb_s") * units::kGiga;
  t.p_bg_w_per_byte =
      require_positive(obj, t.name, "p_bg_mw_gb") * units::kMilliwatt / units::kGiga;
  t.e_read_j_per_bit =
      require_positive(obj, t.name, "e_read_pj_bit") * units::kPicojoule;
  t.e_write_j_per_bit =
      require_positive(obj, t.name, "e_write_pj_bit") * units::kPicojoule;

  // kind == OnChip <=> shoreline absent.
  if (obj.contains("shoreline_mm")) {
    if (t.kind == MemoryKind::OnChip) {
      throw ValidationError("catalog entry '" + t.name +
                            "': on-chip memory must not declare shoreline_mm");
    }
    t.shoreline_mm = require_positive(obj, t.name, "shoreline_mm");
  } else if (t.kind == MemoryKind::OffChip) {
    throw ValidationError("catalog entry '" + t.name +
                          "': off-chip memory requires shoreline_mm");
  }

  if (obj.contains("allowed_units")) {
    if (!obj["allowed_units"].is_array()) {
      throw ParseError("catalog entry '" + t.name +
                       "': allowed_units must be an array of integers");
    }
    for (const auto& u : obj["allowed_units"]) {
      if (!u.is_number_integer() || u.get<int>() < 1) {
        throw ValidationError("catalog entry '" + t.name +
                              "': allowed_units entries must be integers >= 1");
      }
      t.allowed_units.push_back(u.get<int>());
    }
  }
  return t;
}

}  // namespace

Catalog load_catalog(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("catalog: top-level document must be an array");
  }
  Catalog cat;
  for (const auto& obj : doc) {
    MemoryTechnology t = parse_entry(obj);
    if (cat.count(t.name)) {
      throw ValidationError("catalog: duplicate entry '" + t.name + "'");
    }
    cat.emplace(t.name, std::move(t));
  }
  return cat;
}

Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("catalog: cannot open file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_catalog(ss.str());
}

std::string default_catalog_json() {
  // Registry defaults. Ranged datasheet values use midpoints: SRAM background
  // power 10-50 W/GB -> 30 W/GB (= 30000 mW/GB), HBM background 50-100 mW/GB
  // -> 75 mW/GB. All fields overridable via a user catalog.
  return R"json([
  {"name": "SRAM2D",  "kind": "onchip",  "latency_ns": 1.5,  "capacity_gb": 0.256, "bandwidth_gb_s": 4000,  "p_bg_mw_gb": 30000, "e_read_pj_bit": 0.1, "e_write_pj_bit": 0.1, "allowed_units": [1]},
  {"name": "SRAM3D",  "kind": "onchip",  "latency_ns": 5,    "capacity_gb": 1,     "bandwidth_gb_s": 8000,  "p_bg_mw_gb": 30000, "e_read_pj_bit": 0.1, "e_write_pj_bit": 0.1, "allowed_units": [1, 2, 3, 4]},
  {"name": "HBM3E",   "kind": "offchip", "latency_ns": 100,  "capacity_gb": 24,    "bandwidth_gb_s": 1000,  "shoreline_mm": 11,   "p_bg_mw_gb": 75,   "e_read_pj_bit": 3,   "e_write_pj_bit": 3.6, "allowed_units": [1, 2, 4, 8]},
  {"name": "HBM4",    "kind": "offchip", "latency_ns": 100,  "capacity_gb": 36,    "bandwidth_gb_s": 2000,  "shoreline_mm": 15,   "p_bg_mw_gb": 75,   "e_read_pj_bit": 2.2, "e_write_pj_bit": 2.4, "allowed_units": [1, 2, 4, 8]},
  {"name": "LPDDR5X", "kind": "offchip", "latency_ns": 50,   "capacity_gb": 16,    "bandwidth_gb_s": 76.8,  "shoreline_mm": 4.1,  "p_bg_mw_gb": 7.65, "e_read_pj_bit": 5,   "e_write_pj_bit": 6.5, "allowed_units": [1, 2, 4, 8]},
  {"name": "LPDDR6",  "kind": "offchip", "latency_ns": 50,   "capacity_gb": 16,    "bandwidth_gb_s": 172.8, "shoreline_mm": 4.5,  "p_bg_mw_gb": 6.12, "e_read_pj_bit": 3.75, "e_write_pj_bit": 4.87, "allowed_units": [1, 2, 4, 8]},
  {"name": "GDDR6",   "kind": "offchip", "latency_ns": 12,   "capacity_gb": 2,     "bandwidth_gb_s": 64,    "shoreline_mm": 11,   "p_bg_mw_gb": 100,  "e_read_pj_bit": 7,   "e_write_pj_bit": 8.8, "allowed_units": [1, 2, 4, 8]},
  {"name": "GDDR7",   "kind": "offchip", "latency_ns": 12,   "capacity_gb": 3,     "bandwidth_gb_s": 128,   "shoreline_mm": 11,   "p_bg_mw_gb": 120,  "e_read_pj_bit": 5.6, "e_write_pj_bit": 7.0, "allowed_units": [1, 2, 4, 8]},
  {"name": "HBF",     "kind": "offchip", "latency_ns": 1000, "capacity_gb": 384,   "bandwidth_gb_s": 1000,  "shoreline_mm": 8.25, "p_bg_mw_gb": 300,  "e_read_pj_bit": 6,   "e_write_pj_bit": 10,  "allowed_units": [1, 2, 4, 8]}
])json";
}

const Catalog& default_catalog() {
  static const Catalog cat = load_catalog(default_catalog_json());
  return cat;
}

int max_stacks(const MemoryTechnology& tech, const ShorelineBudget& budget) {
  if (tech.kind != MemoryKind::OffChip || !tech.shoreline_mm) {
    throw DomainError("max_stacks: '" + tech.name +
                      "' is on-chip and does not consume die shoreline");
  }
  budget.validate();
  double per_stack = *tech.shoreline_mm + budget.l_margin_mm;
  return static_cast<int>(std::floor(budget.l_mem_mm / per_stack));
}

}  // namespace memx
