// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "memexplorer/dse.hpp"
#include "memexplorer/evaluator.hpp"

namespace memx {

/// File formats: design.json, workload.json, space.json, result.json. Parsing
/// throws ParseError/ValidationError with the offending field named.
Workload workload_from_json(const nlohmann::json& doc);
DesignPoint design_from_json(const nlohmann::json& doc, const Catalog& catalog);
nlohmann::json design_to_json(const DesignPoint& design);
DesignSpace space_from_json(const nlohmann::json& doc);

nlohmann::json stage_result_to_json(const StageResult& result);
nlohmann::json frontier_row_to_json(const FrontierRow& row);

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Fixed-format floating point for CSV cells: '.' decimal separator,
/// round-trippable shortest representation, platform-independent.
std::string csv_double(double v);

/// One line per step: step, hv, throughput_tps, power_w, design_id.
std::string history_csv(const DseHistory& history);
/// Table-shaped frontier: compute, tiers, strategy, power, batch, tps, tokens/J.
std::string frontier_csv(const std::vector<FrontierRow>& rows);
/// throughput, power, tokens_per_j, feasible flag for external plotting.
std::string pareto_points_csv(const DseResult& result, double tdp_budget_w);
/// Per-step mean +- std of hypervolume across seeds, per method.
std::string hv_summary_csv(const std::vector<DseHistory>& histories);

/// SHA-like stable content hash (FNV-1a 64) of a file's bytes, hex-encoded.
std::string content_hash(const std::string& text);

}  // namespace memx
