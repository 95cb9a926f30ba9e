// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memexplorer/errors.hpp"
#include "memexplorer/units.hpp"

namespace memx {

void ModelSpec::validate() const {
  if (num_layers < 1 || hidden_dim < 1 || num_heads < 1 || num_kv_heads < 1 ||
      head_dim < 1 || ffn_dim < 1 || vocab_size < 1) {
    throw ValidationError("model '" + name + "': all shape fields must be >= 1");
  }
  if (num_heads % num_kv_heads != 0) {
    throw ValidationError("model '" + name +
                          "': num_heads must be a multiple of num_kv_heads");
  }
  if (moe) {
    if (!(moe->total_params > 0.0) || !(moe->active_params_per_token > 0.0)) {
      throw ValidationError("model '" + name + "': MoE parameter counts must be positive");
    }
    if (moe->active_params_per_token > moe->total_params) {
      throw ValidationError("model '" + name +
                            "': MoE active parameters exceed total parameters");
    }
  }
  if (diffusion_steps && *diffusion_steps < 1) {
    throw ValidationError("model '" + name + "': diffusion_steps must be >= 1");
  }
}

double ModelSpec::attn_params_per_layer() const {
  const double h = hidden_dim;
  const double q_dim = static_cast<double>(num_heads) * head_dim;
  const double kv_dim = static_cast<double>(num_kv_heads) * head_dim;
  return h * q_dim + 2.0 * h * kv_dim + q_dim * h;
}

double ModelSpec::ffn_params_per_layer() const {
  // Gated FFN convention: gate + up + down projections.
  return 3.0 * static_cast<double>(hidden_dim) * ffn_dim;
}

double ModelSpec::embedding_params() const {
  return 2.0 * static_cast<double>(vocab_size) * hidden_dim;
}

double ModelSpec::param_count() const {
  if (moe) return moe->total_params;
  return embedding_params() +
         num_layers * (attn_params_per_layer() + ffn_params_per_layer());
}

double ModelSpec::active_param_count() const {
  if (moe) return moe->active_params_per_token;
  return param_count();
}

void WorkloadTrace::validate() const {
  if (prompt_tokens < 0 || generated_tokens < 0) {
    throw ValidationError("trace: token counts must be non-negative");
  }
  if (stage == Stage::Prefill && prompt_tokens < 1) {
    throw ValidationError("trace: prefill requires prompt_tokens >= 1");
  }
}

void PrecisionConfig::validate() const {
  for (int bits : {weight_bits, activation_bits, kv_bits}) {
    if (bits != 4 && bits != 8 && bits != 16) {
      throw ValidationError("precision: bit widths must be one of {4, 8, 16}");
    }
  }
}

Footprints tensor_footprints(const ModelSpec& model,
                             const PrecisionConfig& precision,
                             const WorkloadTrace& trace, long long batch) {
  model.validate();
  precision.validate();
  trace.validate();
  if (batch < 0) throw ValidationError("footprints: negative batch");

  const double wb = precision.weight_bits / units::kBitsPerByte;
  const double ab = precision.activation_bits / units::kBitsPerByte;
  const double kb = precision.kv_bits / units::kBitsPerByte;
  const double seq = static_cast<double>(trace.total_tokens());
  const double b = static_cast<double>(batch);

  Footprints f;
  f.weights_bytes = model.param_count() * wb;
  f.kv_bytes_per_seq = 2.0 * model.num_layers * model.num_kv_heads *
                       model.head_dim * seq * kb;
  // Working set per layer with attention scores streamed flash-style: the
  // larger of the QKV projections and the FFN intermediate.
  const double qkv_elems =
      seq * (static_cast<double>(model.num_heads) * model.head_dim +
             2.0 * model.num_kv_heads * model.head_dim);
  const double ffn_elems = seq * static_cast<double>(model.ffn_dim);
  f.act_bytes_peak = std::max(qkv_elems, ffn_elems) * ab * b;
  // Storage metric: one hidden-state tensor per layer over the sequence.
  // The working-set model above is what placement uses; this per-layer view
  // is what end-to-end storage accounting reports.
  f.act_bytes_total = static_cast<double>(model.num_layers) * seq *
                      model.hidden_dim * ab * b;
  f.total_bytes = f.weights_bytes + b * f.kv_bytes_per_seq + f.act_bytes_total;
  return f;
}

long long decode_max_batch(const ModelSpec& model,
                           const PrecisionConfig& precision,
                           const WorkloadTrace& trace,
                           const HierarchySpec& hierarchy) {
  Footprints f = tensor_footprints(model, precision, trace, 1);
  const double capacity = hierarchy.total_capacity();
  if (f.weights_bytes > capacity) {
    std::ostringstream os;
    os << "decode: weights (" << f.weights_bytes / units::kGiga
       << " GB) exceed total hierarchy capacity (" << capacity / units::kGiga
       << " GB)";
    throw InfeasibleError(InfeasibleError::Kind::Capacity, os.str());
  }
  if (!(f.kv_bytes_per_seq > 0.0)) {
    throw ValidationError("decode: KV bytes per sequence is zero for this trace");
  }
  double batches = std::floor((capacity - f.weights_bytes) / f.kv_bytes_per_seq);
  return batches < 0.0 ? 0 : static_cast<long long>(batches);
}

PassPlan expand_workload_flavor(const ModelSpec& model,
                                const WorkloadTrace& trace) {
  (void)trace;
  PassPlan plan;
  if (model.diffusion_steps) {
    plan.num_passes = *model.diffusion_steps;
    plan.full_sequence = true;
  }
  if (model.moe) {
    plan.weight_traffic_scale =
        model.moe->active_params_per_token / model.moe->total_params;
  }
  return plan;
}

namespace {

enum ClassId { kWeights = 0, kKv = 1, kAct = 2, kNumClasses = 3 };

ClassId pinned_class(Dataflow df) {
  switch (df) {
    case Dataflow::WS: return kWeights;
    case Dataflow::IS: return kAct;  // inputs stationary
    case Dataflow::OS: return kAct;  // partial-sum outputs stationary
  }
  return kWeights;
}

int tile_passes(double pinned_layer_bytes, double pinned_alloc_bytes,
                double min_tile_bytes) {
  if (pinned_layer_bytes <= 0.0) return 1;
  double denom = pinned_alloc_bytes > 0.0 ? pinned_alloc_bytes : min_tile_bytes;
  denom = std::max(denom, 1.0);
  double p = std::ceil(pinned_layer_bytes / denom);
  return static_cast<int>(std::max(1.0, p));
}

}  // namespace

TrafficPlan stage_traffic_at(const ModelSpec& model,
                             const PrecisionConfig& precision,
                             const WorkloadTrace& trace,
                             const SoftwareStrategy& strategy,
                             const HierarchySpec& hierarchy, long long batch,
                             Stage stage, long long seq_tokens,
                             long long kv_len_tokens) {
  model.validate();
  precision.validate();
  hierarchy.validate();
  if (batch < 1) throw ValidationError("stage_traffic: batch must be >= 1");

  const PassPlan plan = expand_workload_flavor(model, trace);
  const double wb = precision.weight_bits / units::kBitsPerByte;
  const double ab = precision.activation_bits / units::kBitsPerByte;
  const double kb = precision.kv_bits / units::kBitsPerByte;
  const double b = static_cast<double>(batch);
  const double seq = static_cast<double>(seq_tokens);
  const double kv_len = static_cast<double>(kv_len_tokens);

  // Class footprints driving residency. KV residency is sized at the stage's
  // end state (full trace length for decode, the processed sequence for
  // prefill); the activation working set is sized at the stage's sequence
  // length, so decode steps only claim their per-step tensors.
  const double kv_resident_tokens =
      stage == Stage::Prefill ? seq : static_cast<double>(trace.total_tokens());
  const double q_dim = static_cast<double>(model.num_heads) * model.head_dim;
  const double kv_dim = static_cast<double>(model.num_kv_heads) * model.head_dim;
  const double act_ws_bytes =
      std::max(seq * (q_dim + 2.0 * kv_dim), seq * model.ffn_dim) * ab * b;
  const double totals[kNumClasses] = {
      model.param_count() * wb,
      2.0 * model.num_layers * kv_dim * kb * b * kv_resident_tokens,
      act_ws_bytes,
  };

  const std::size_t n_tiers = hierarchy.tiers.size();
  std::vector<double> cap_rem(n_tiers);
  std::size_t n_onchip = 0;
  for (std::size_t i = 0; i < n_tiers; ++i) {
    cap_rem[i] = hierarchy.tiers[i].aggregate_capacity();
    if (hierarchy.tiers[i].tech.kind == MemoryKind::OnChip) n_onchip = i + 1;
  }

  // claims[c][t] = bytes of class c resident at tier t.
  std::vector<std::vector<double>> claims(kNumClasses,
                                          std::vector<double>(n_tiers, 0.0));
  double remaining[kNumClasses] = {totals[0], totals[1], totals[2]};

  const ClassId pinned = pinned_class(strategy.dataflow);
  auto take = [&](ClassId c, std::size_t tier, double want) {
    double got = std::min(want, cap_rem[tier]);
    claims[c][tier] += got;
    cap_rem[tier] -= got;
    remaining[c] -= got;
    return got;
  };

  // (a) Stationary operand claims on-chip capacity first.
  for (std::size_t t = 0; t < n_onchip && remaining[pinned] > 0.0; ++t) {
    take(pinned, t, remaining[pinned]);
  }

  // (b) Remaining on-chip capacity by storage priority.
  std::vector<ClassId> others;
  for (ClassId c : {kAct, kKv, kWeights}) {
    if (c != pinned) others.push_back(c);
  }
  if (strategy.storage_priority == StoragePriority::Equal) {
    // Split each on-chip tier proportionally to the unmet class demands.
    for (std::size_t t = 0; t < n_onchip; ++t) {
      double demand = 0.0;
      for (ClassId c : others) demand += remaining[c];
      if (demand <= 0.0 || cap_rem[t] <= 0.0) continue;
      double cap = cap_rem[t];
      for (ClassId c : others) {
        take(c, t, std::min(remaining[c], cap * remaining[c] / demand));
      }
    }
  } else {
    std::vector<ClassId> order;
    ClassId pri = strategy.storage_priority == StoragePriority::Activation ? kAct
                  : strategy.storage_priority == StoragePriority::KVCache  ? kKv
                                                                           : kWeights;
    if (pri != pinned) order.push_back(pri);
    for (ClassId c : others) {
      if (c != pri) order.push_back(c);
    }
    for (std::size_t t = 0; t < n_onchip; ++t) {
      for (ClassId c : order) {
        if (remaining[c] > 0.0) take(c, t, remaining[c]);
      }
    }
  }

  // (c) Residuals fill off-chip tiers outward, stationary class first.
  std::vector<ClassId> spill_order{pinned};
  for (ClassId c : others) spill_order.push_back(c);
  for (std::size_t t = n_onchip; t < n_tiers; ++t) {
    for (ClassId c : spill_order) {
      if (remaining[c] > 0.0) take(c, t, remaining[c]);
    }
  }
  double shortfall = remaining[0] + remaining[1] + remaining[2];
  if (shortfall > 1e-6) {
    std::ostringstream os;
    os << "workload does not fit: " << shortfall / units::kGiga
       << " GB overflow (weights " << totals[0] / units::kGiga << " GB, KV "
       << totals[1] / units::kGiga << " GB, activations "
       << totals[2] / units::kGiga << " GB vs capacity "
       << hierarchy.total_capacity() / units::kGiga << " GB)";
    throw InfeasibleError(InfeasibleError::Kind::Capacity, os.str());
  }

  TrafficPlan out;
  auto alpha_of = [&](ClassId c) {
    std::vector<double> a(n_tiers, 0.0);
    if (totals[c] <= 0.0) {
      a[0] = 1.0;  // placeholder placement for empty classes
      return a;
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < n_tiers; ++t) {
      a[t] = claims[c][t] / totals[c];
      acc += a[t];
    }
    a[n_tiers - 1] += 1.0 - acc;  // absorb fp slack so fractions sum to 1
    return a;
  };
  out.alpha_weights = alpha_of(kWeights);
  out.alpha_kv = alpha_of(kKv);
  out.alpha_act = alpha_of(kAct);
  auto onchip_sum = [&](ClassId c) {
    double s = 0.0;
    for (std::size_t t = 0; t < n_onchip; ++t) s += claims[c][t];
    return s;
  };
  out.weights_onchip_bytes = onchip_sum(kWeights);
  out.kv_onchip_bytes = onchip_sum(kKv);
  out.act_onchip_bytes = onchip_sum(kAct);

  // (e) Bandwidth split between matrix (weights/KV) and vector (acts) streams.
  switch (strategy.bw_priority) {
    case BwPriority::Matrix: out.matrix_share = 0.75; out.vector_share = 0.25; break;
    case BwPriority::Vector: out.matrix_share = 0.25; out.vector_share = 0.75; break;
    case BwPriority::Equal:  out.matrix_share = 0.50; out.vector_share = 0.50; break;
  }

  // Tile re-read multipliers. The stationary operand is loaded once per
  // layer; the streamed GEMM operands are re-read once per stationary tile
  // group. With no on-chip allocation the tile shrinks to a bare PE-array
  // tile (128x128 elements).
  const double attn_w_bytes = model.attn_params_per_layer() * wb;
  const double ffn_w_bytes =
      model.ffn_params_per_layer() * wb * plan.weight_traffic_scale;
  const double act_io_bytes = b * seq * model.hidden_dim * ab;  // one direction
  const double min_tile_elems = 128.0 * 128.0;
  double pinned_alloc = onchip_sum(pinned);
  double pinned_elem_bytes = pinned == kWeights ? wb : ab;
  double min_tile = min_tile_elems * pinned_elem_bytes;

  double pinned_attn_bytes = pinned == kWeights ? attn_w_bytes : act_io_bytes;
  double pinned_ffn_bytes = pinned == kWeights ? ffn_w_bytes : act_io_bytes;
  out.passes_attention = tile_passes(pinned_attn_bytes, pinned_alloc, min_tile);
  out.passes_ffn = tile_passes(pinned_ffn_bytes, pinned_alloc, min_tile);

  // Per-layer requests carry one tile pass's worth of traffic (each operand
  // streamed once); the evaluator repeats whole passes.
  auto add = [&](StreamRequest::Operand op, const std::string& sub,
                 bool matrix, bool write, double bytes,
                 const std::vector<double>& alpha) {
    if (bytes <= 0.0) return;
    StreamRequest r;
    r.operand = op;
    r.sub_op = sub;
    r.matrix_stream = matrix;
    r.is_write = write;
    r.request.total_bytes = bytes;
    r.request.placement = alpha;
    out.layer_requests.push_back(std::move(r));
  };

  const double kv_io_per_layer =
      2.0 * model.num_kv_heads * model.head_dim * kb * b;

  // Attention sub-op.
  add(StreamRequest::Operand::Weights, "attention", true, false, attn_w_bytes,
      out.alpha_weights);
  add(StreamRequest::Operand::Activation, "attention", false, false,
      act_io_bytes, out.alpha_act);
  add(StreamRequest::Operand::Activation, "attention", false, true,
      act_io_bytes, out.alpha_act);
  if (stage == Stage::Prefill) {
    add(StreamRequest::Operand::KvCache, "attention", true, true,
        kv_io_per_layer * seq, out.alpha_kv);
  } else {
    add(StreamRequest::Operand::KvCache, "attention", true, false,
        kv_io_per_layer * kv_len, out.alpha_kv);
    add(StreamRequest::Operand::KvCache, "attention", true, true,
        kv_io_per_layer * seq, out.alpha_kv);
  }

  // FFN sub-op.
  add(StreamRequest::Operand::Weights, "ffn", true, false, ffn_w_bytes,
      out.alpha_weights);
  add(StreamRequest::Operand::Activation, "ffn", false, false, act_io_bytes,
      out.alpha_act);
  add(StreamRequest::Operand::Activation, "ffn", false, true, act_io_bytes,
      out.alpha_act);

  return out;
}

TrafficPlan stage_traffic(const ModelSpec& model,
                          const PrecisionConfig& precision,
                          const WorkloadTrace& trace,
                          const SoftwareStrategy& strategy,
                          const HierarchySpec& hierarchy, long long batch,
                          Stage stage) {
  const PassPlan plan = expand_workload_flavor(model, trace);
  long long seq, kv_len;
  if (stage == Stage::Prefill) {
    seq = plan.full_sequence ? trace.total_tokens() : trace.prompt_tokens;
    kv_len = seq;
  } else {
    // Decode steps process one token per sequence; KV length at the
    // representative midpoint of the generation.
    seq = plan.full_sequence ? trace.total_tokens() : 1;
    kv_len = trace.prompt_tokens + trace.generated_tokens / 2;
  }
  return stage_traffic_at(model, precision, trace, strategy, hierarchy, batch,
                          stage, seq, kv_len);
}

const char* to_string(Dataflow v) {
  switch (v) {
    case Dataflow::WS: return "WS";
    case Dataflow::IS: return "IS";
    case Dataflow::OS: return "OS";
  }
  return "?";
}
const char* to_string(StoragePriority v) {
  switch (v) {
    case StoragePriority::Activation: return "Activation";
    case StoragePriority::KVCache: return "KVCache";
    case StoragePriority::Weight: return "Weight";
    case StoragePriority::Equal: return "Equal";
  }
  return "?";
}
const char* to_string(BwPriority v) {
  switch (v) {
    case BwPriority::Matrix: return "Matrix";
    case BwPriority::Vector: return "Vector";
    case BwPriority::Equal: return "Equal";
  }
  return "?";
}
const char* to_string(Stage v) {
  switch (v) {
    case Stage::Prefill: return "prefill";
    case Stage::Decode: return "decode";
    case Stage::Combined: return "combined";
  }
  return "?";
}

}  // namespace memx
