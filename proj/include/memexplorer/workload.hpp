// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memexplorer/hierarchy.hpp"

namespace memx {

struct MoeConfig {
  double total_params = 0.0;
  double active_params_per_token = 0.0;
  int num_experts = 0;
  int experts_per_token = 0;
};

/// Transformer shape. Parameter counts are derived from the shape for dense
/// models; MoE models carry explicit totals.
struct ModelSpec {
  std::string name;
  int num_layers = 0;
  int hidden_dim = 0;
  int num_heads = 0;
  int num_kv_heads = 0;
  int head_dim = 0;
  int ffn_dim = 0;
  long long vocab_size = 0;
  std::optional<MoeConfig> moe;
  std::optional<int> diffusion_steps;  // full-sequence denoising iterations

  void validate() const;

  double attn_params_per_layer() const;
  double ffn_params_per_layer() const;  // dense equivalent
  double embedding_params() const;      // input embedding + output head
  /// Stored parameters (MoE: total across experts).
  double param_count() const;
  /// Parameters touched per token (MoE: active subset; dense: all).
  double active_param_count() const;
};

enum class Stage { Prefill, Decode, Combined };

struct WorkloadTrace {
  long long prompt_tokens = 0;
  long long generated_tokens = 0;
  Stage stage = Stage::Prefill;

  void validate() const;
  long long total_tokens() const { return prompt_tokens + generated_tokens; }
};

/// Element bit widths per tensor class, reduced from the MX format families
/// to bits per element.
struct PrecisionConfig {
  int weight_bits = 8;
  int activation_bits = 8;
  int kv_bits = 8;

  void validate() const;  // each in {4, 8, 16}
};

enum class Dataflow { WS, IS, OS };
enum class StoragePriority { Activation, KVCache, Weight, Equal };
enum class BwPriority { Matrix, Vector, Equal };

struct SoftwareStrategy {
  Dataflow dataflow = Dataflow::WS;
  StoragePriority storage_priority = StoragePriority::Equal;
  BwPriority bw_priority = BwPriority::Equal;
};

/// Byte footprints for one workload instance.
struct Footprints {
  double weights_bytes = 0.0;      // stored parameters (MoE: total)
  double kv_bytes_per_seq = 0.0;   // K+V over prompt+generated tokens
  double act_bytes_peak = 0.0;     // largest single-layer working set x batch
  double act_bytes_total = 0.0;    // per-layer hidden states over the sequence x batch
  double total_bytes = 0.0;        // weights + batch*kv + act_bytes_total
};

Footprints tensor_footprints(const ModelSpec& model,
                             const PrecisionConfig& precision,
                             const WorkloadTrace& trace, long long batch);

/// Largest decode batch whose weights + per-sequence KV fit in the summed
/// capacity of every tier (on-chip included). Throws
/// InfeasibleError{Capacity} when the weights alone do not fit.
long long decode_max_batch(const ModelSpec& model,
                           const PrecisionConfig& precision,
                           const WorkloadTrace& trace,
                           const HierarchySpec& hierarchy);

/// Execution-shape adjustments for non-dense model flavors.
struct PassPlan {
  int num_passes = 1;           // full-sequence denoising passes (diffusion)
  bool full_sequence = false;   // every pass runs over prompt+generated tokens
  double weight_traffic_scale = 1.0;  // MoE: active/total parameter ratio
};

PassPlan expand_workload_flavor(const ModelSpec& model,
                                const WorkloadTrace& trace);

/// One bulk transfer of a single operand class for one layer sub-op.
struct StreamRequest {
  enum class Operand { Weights, KvCache, Activation };
  Operand operand;
  std::string sub_op;        // "attention" | "ffn"
  bool matrix_stream = true; // weights/KV ride the matrix stream, acts the vector stream
  bool is_write = false;
  TransferRequest request;   // bytes include the tile re-read multiplier
};

/// Placement and traffic for one representative layer of a stage. Layers are
/// uniform, so per-stage totals are per-layer values times num_layers
/// (times pass count for multi-pass flavors).
struct TrafficPlan {
  std::vector<double> alpha_weights;
  std::vector<double> alpha_kv;
  std::vector<double> alpha_act;
  double weights_onchip_bytes = 0.0;
  double kv_onchip_bytes = 0.0;
  double act_onchip_bytes = 0.0;
  int passes_attention = 1;  // tile re-read multiplier per sub-op
  int passes_ffn = 1;
  double matrix_share = 0.5;
  double vector_share = 0.5;
  std::vector<StreamRequest> layer_requests;
};

/// Builds placement fractions and per-layer transfer requests:
/// (a) the dataflow-stationary operand claims on-chip capacity first,
/// (b) storage priority orders the remaining classes (Equal splits
///     proportionally), (c) residuals fill off-chip tiers outward,
/// (d) every emitted request carries its class placement,
/// (e) bandwidth priority fixes the matrix/vector split (75/25, 25/75, 50/50).
/// Requests describe one tile pass; the stationary operand fits on-chip in
/// passes = ceil(stationary layer bytes / stationary on-chip share) tile
/// groups, and a prefill layer repeats once per group.
TrafficPlan stage_traffic(const ModelSpec& model,
                          const PrecisionConfig& precision,
                          const WorkloadTrace& trace,
                          const SoftwareStrategy& strategy,
                          const HierarchySpec& hierarchy, long long batch,
                          Stage stage);

/// Same, with explicit sequence/KV lengths (used by stage slicing).
TrafficPlan stage_traffic_at(const ModelSpec& model,
                             const PrecisionConfig& precision,
                             const WorkloadTrace& trace,
                             const SoftwareStrategy& strategy,
                             const HierarchySpec& hierarchy, long long batch,
                             Stage stage, long long seq_tokens,
                             long long kv_len_tokens);

const char* to_string(Dataflow v);
const char* to_string(StoragePriority v);
const char* to_string(BwPriority v);
const char* to_string(Stage v);

}  // namespace memx
