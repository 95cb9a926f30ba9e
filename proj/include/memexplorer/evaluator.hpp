// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "memexplorer/power.hpp"
#include "memexplorer/workload.hpp"

namespace memx {

struct ComputeSpec {
  int pe_rows = 2048;
  int pe_cols = 128;
  int vlen = 2048;
  double clock_hz = 1e9;

  double pe_count() const { return static_cast<double>(pe_rows) * pe_cols; }
  double matrix_flops_per_s() const { return 2.0 * pe_count() * clock_hz; }
  double vector_ops_per_s() const { return static_cast<double>(vlen) * clock_hz; }
  void validate() const;
};

/// Full design configuration: one point of the co-design space.
struct DesignPoint {
  ComputeSpec compute;
  HierarchySpec hierarchy;
  PrecisionConfig precision;
  SoftwareStrategy strategy;
  ComputePowerModel power;
  std::string id;  // optional label for reports
};

struct Workload {
  ModelSpec model;
  WorkloadTrace trace;
  PrecisionConfig precision;  // default when the design does not pin one
};

struct LayerCost {
  std::string kind;       // "attention" | "ffn"
  double compute_s = 0.0;  // matrix-unit time
  double vector_s = 0.0;
  double transfer_s = 0.0;
  double latency_s = 0.0;
  bool memory_bound = false;
};

struct StageResult {
  std::string stage;
  double latency_s = 0.0;
  double tokens = 0.0;
  double tps = 0.0;
  long long batch = 1;
  PowerReport power;
  double energy_per_token_j = 0.0;
  double matrix_utilization = 0.0;
  double vector_utilization = 0.0;
  std::vector<LayerCost> per_layer;  // whole-stage totals per layer sub-op
  int passes = 1;
  std::string notes;
};

/// Prefill: batch 1 (unless overridden), per layer latency =
/// max(compute, transfer) under double buffering, TTFT summed over layers and
/// passes, throughput = prompt tokens / TTFT.
StageResult eval_prefill(const DesignPoint& design, const Workload& workload,
                         long long batch = 1);

/// Decode: batch maxed against capacity, KV length at the generation
/// midpoint, per-token latency summed over layers, throughput =
/// batch / per-token latency. `batch_override` > 0 pins a smaller batch
/// (capped at the capacity maximum).
StageResult eval_decode(const DesignPoint& design, const Workload& workload,
                        long long batch_override = 0);

/// Prefill + decode on disaggregated devices joined by a KV-handoff link.
StageResult eval_pd_combined(const StageResult& prefill,
                             const StageResult& decode, double kv_bytes,
                             double link_bandwidth_bytes_per_s,
                             const MemoryPowerCoefficients& sender,
                             const MemoryPowerCoefficients& receiver);

/// Four-slice heterogeneity breakdown: prefill split by layer kind, decode
/// split into early (first half of generated tokens) and late halves.
std::vector<std::pair<std::string, StageResult>> stage_breakdown(
    const DesignPoint& design, const Workload& workload);

/// Stage dispatcher used by the CLI and the DSE objective.
StageResult evaluate_stage(const DesignPoint& design, const Workload& workload,
                           Stage stage);

}  // namespace memx
