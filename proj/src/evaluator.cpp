// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "memexplorer/errors.hpp"
#include "memexplorer/units.hpp"

namespace memx {

void ComputeSpec::validate() const {
  if (pe_rows < 1 || pe_cols < 1 || vlen < 1 || !(clock_hz > 0.0)) {
    throw ValidationError("compute spec: dimensions and clock must be positive");
  }
}

namespace {

struct PassCost {
  LayerCost attn;  // one layer, one tile pass
  LayerCost ffn;
  // per tier, one layer, one pass, split by sub-op [0]=attention [1]=ffn
  std::vector<double> read_bytes[2];
  std::vector<double> write_bytes[2];
  TrafficPlan plan;
};

LayerCost sub_op_cost(const std::string& kind, double matrix_s,
                      double vector_flops, double matrix_time,
                      double vector_time, const ComputeSpec& compute) {
  LayerCost c;
  c.kind = kind;
  c.compute_s = matrix_s;
  c.vector_s = vector_flops / compute.vector_ops_per_s();
  c.transfer_s = std::max(matrix_time, vector_time);
  c.latency_s = std::max({c.compute_s, c.vector_s, c.transfer_s});
  c.memory_bound = c.transfer_s >= std::max(c.compute_s, c.vector_s);
  return c;
}

/// Cost of one layer for one pass/step at explicit sequence and KV lengths.
PassCost eval_pass(const DesignPoint& design, const Workload& workload,
                   long long batch, Stage stage, long long seq_tokens,
                   long long kv_len_tokens) {
  const ModelSpec& m = workload.model;
  const PassPlan flavor = expand_workload_flavor(m, workload.trace);

  PassCost pc;
  pc.plan = stage_traffic_at(m, design.precision, workload.trace,
                             design.strategy, design.hierarchy, batch, stage,
                             seq_tokens, kv_len_tokens);
  const std::vector<double> eff = effective_bandwidths(design.hierarchy);
  const std::size_t n_tiers = design.hierarchy.tiers.size();
  for (int s = 0; s < 2; ++s) {
    pc.read_bytes[s].assign(n_tiers, 0.0);
    pc.write_bytes[s].assign(n_tiers, 0.0);
  }

  double matrix_time[2] = {0.0, 0.0};  // [attention, ffn]
  double vector_time[2] = {0.0, 0.0};
  for (const auto& r : pc.plan.layer_requests) {
    const int s = r.sub_op == "attention" ? 0 : 1;
    const double share =
        r.matrix_stream ? pc.plan.matrix_share : pc.plan.vector_share;
    const double t = total_transfer_time(r.request, design.hierarchy, eff, share);
    (r.matrix_stream ? matrix_time : vector_time)[s] += t;
    for (std::size_t i = 0; i < n_tiers; ++i) {
      (r.is_write ? pc.write_bytes : pc.read_bytes)[s][i] +=
          std::max(0.0, r.request.placement[i]) * r.request.total_bytes;
    }
  }

  const double b = static_cast<double>(batch);
  const double seq = static_cast<double>(seq_tokens);
  const double kv_len = static_cast<double>(kv_len_tokens);
  const double q_dim = static_cast<double>(m.num_heads) * m.head_dim;
  const double h = m.hidden_dim;

  // Systolic pipeline fill/drain: a GEMM streaming M rows through an RxC
  // array sustains M/(M + R + C) of peak. Negligible for long-sequence
  // prefill, dominant for small decode batches (low array utilization until
  // capacity admits a larger batch).
  const double array_span =
      static_cast<double>(design.compute.pe_rows) + design.compute.pe_cols;
  auto fill = [&](double streamed_rows) {
    return streamed_rows / (streamed_rows + array_span);
  };
  const double peak = design.compute.matrix_flops_per_s();
  const double proj_flops = 2.0 * b * seq * m.attn_params_per_layer();
  const double attn_flops = 4.0 * b * seq * kv_len * q_dim;  // QK^T + PV
  const double ffn_flops =
      2.0 * b * seq * m.ffn_params_per_layer() * flavor.weight_traffic_scale;
  const double attn_matrix_s =
      proj_flops / (peak * fill(b * seq)) + attn_flops / (peak * fill(kv_len));
  const double ffn_matrix_s = ffn_flops / (peak * fill(b * seq));

  const double attn_vector_flops =
      b * seq * (5.0 * m.num_heads * kv_len + 10.0 * h);
  const double ffn_vector_flops =
      b * seq * (4.0 * m.ffn_dim * flavor.weight_traffic_scale + 2.0 * h);

  pc.attn = sub_op_cost("attention", attn_matrix_s, attn_vector_flops,
                        matrix_time[0], vector_time[0], design.compute);
  pc.ffn = sub_op_cost("ffn", ffn_matrix_s, ffn_vector_flops, matrix_time[1],
                       vector_time[1], design.compute);
  return pc;
}

/// Assembles a StageResult from one-pass layer costs. Each sub-op repeats
/// `repeats` times (flavor passes x decode steps) times its own tile pass
/// count, if `tile_passes` is set (prefill; decode streams operands once per
/// step).
StageResult assemble(const DesignPoint& design, const Workload& workload,
                     const char* stage_name, const PassCost& pc,
                     double repeats, double tokens, long long batch,
                     bool tile_passes, bool include_attn = true,
                     bool include_ffn = true) {
  const ModelSpec& m = workload.model;
  StageResult res;
  res.stage = stage_name;
  res.batch = batch;
  res.passes = std::max(pc.plan.passes_attention, pc.plan.passes_ffn);

  const double attn_scale =
      repeats * (tile_passes ? pc.plan.passes_attention : 1);
  const double ffn_scale = repeats * (tile_passes ? pc.plan.passes_ffn : 1);

  double layer_latency = 0.0, layer_compute = 0.0, layer_vector = 0.0;
  if (include_attn) {
    layer_latency += pc.attn.latency_s * attn_scale;
    layer_compute += pc.attn.compute_s * attn_scale;
    layer_vector += pc.attn.vector_s * attn_scale;
  }
  if (include_ffn) {
    layer_latency += pc.ffn.latency_s * ffn_scale;
    layer_compute += pc.ffn.compute_s * ffn_scale;
    layer_vector += pc.ffn.vector_s * ffn_scale;
  }
  res.latency_s = layer_latency * m.num_layers;
  res.tokens = tokens;
  res.tps = res.latency_s > 0.0 ? tokens / res.latency_s : 0.0;

  auto scaled = [&](const LayerCost& c, double scale) {
    LayerCost out = c;
    out.compute_s *= scale;
    out.vector_s *= scale;
    out.transfer_s *= scale;
    out.latency_s *= scale;
    return out;
  };
  for (int l = 0; l < m.num_layers; ++l) {
    if (include_attn) res.per_layer.push_back(scaled(pc.attn, attn_scale));
    if (include_ffn) res.per_layer.push_back(scaled(pc.ffn, ffn_scale));
  }

  if (res.latency_s > 0.0) {
    res.matrix_utilization =
        std::min(1.0, layer_compute * m.num_layers / res.latency_s);
    res.vector_utilization =
        std::min(1.0, layer_vector * m.num_layers / res.latency_s);
  }

  ActivityProfile activity;
  activity.matrix_utilization = res.matrix_utilization;
  activity.vector_utilization = res.vector_utilization;
  for (std::size_t i = 0; i < design.hierarchy.tiers.size(); ++i) {
    TierActivity ta;
    if (res.latency_s > 0.0) {
      const double peak = design.hierarchy.tiers[i].aggregate_peak_bandwidth();
      const double layers_per_s = m.num_layers / res.latency_s;
      double reads = 0.0, writes = 0.0;
      if (include_attn) {
        reads += pc.read_bytes[0][i] * attn_scale;
        writes += pc.write_bytes[0][i] * attn_scale;
      }
      if (include_ffn) {
        reads += pc.read_bytes[1][i] * ffn_scale;
        writes += pc.write_bytes[1][i] * ffn_scale;
      }
      ta.bw_read_bytes_per_s = std::max(0.0, reads * layers_per_s);
      ta.bw_write_bytes_per_s = std::max(0.0, writes * layers_per_s);
      // Overlap accounting can momentarily exceed the aggregate port rate;
      // power never can.
      double total = ta.bw_read_bytes_per_s + ta.bw_write_bytes_per_s;
      if (total > peak) {
        ta.bw_read_bytes_per_s *= peak / total;
        ta.bw_write_bytes_per_s *= peak / total;
      }
    }
    activity.tiers.push_back(ta);
  }
  res.power = system_power(design.hierarchy, design.compute.pe_count(),
                           design.compute.vlen, activity, design.power);
  res.energy_per_token_j =
      tokens > 0.0 ? res.power.avg_power_w * res.latency_s / tokens : 0.0;
  return res;
}

}  // namespace

StageResult eval_prefill(const DesignPoint& design, const Workload& workload,
                         long long batch) {
  design.compute.validate();
  design.hierarchy.validate();
  if (workload.model.num_layers < 1) throw ValidationError("empty model");
  workload.trace.validate();
  if (workload.trace.prompt_tokens < 1) {
    throw ValidationError("prefill requires prompt_tokens >= 1");
  }

  const PassPlan flavor = expand_workload_flavor(workload.model, workload.trace);
  const long long seq = flavor.full_sequence ? workload.trace.total_tokens()
                                             : workload.trace.prompt_tokens;
  PassCost pc = eval_pass(design, workload, batch, Stage::Prefill, seq, seq);
  StageResult res =
      assemble(design, workload, "prefill", pc, flavor.num_passes,
               static_cast<double>(seq) * batch, batch, /*tile_passes=*/true);
  res.notes = "activation footprint is a working-set approximation";
  return res;
}

StageResult eval_decode(const DesignPoint& design, const Workload& workload,
                        long long batch_override) {
  design.compute.validate();
  design.hierarchy.validate();
  workload.trace.validate();

  long long batch = decode_max_batch(workload.model, design.precision,
                                     workload.trace, design.hierarchy);
  if (batch_override > 0) batch = std::min(batch, batch_override);
  if (batch < 1) {
    throw InfeasibleError(
        InfeasibleError::Kind::Decode,
        "decode: no batch fits (weights + one sequence of KV exceed capacity)");
  }
  const long long gen = workload.trace.generated_tokens;
  const PassPlan flavor = expand_workload_flavor(workload.model, workload.trace);
  const long long seq =
      flavor.full_sequence ? workload.trace.total_tokens() : 1;
  const long long kv_mid = workload.trace.prompt_tokens + gen / 2;

  // The activation working set is not part of the batch formula; if the
  // capacity fill rejects the maximal batch over that slack, back off.
  for (;;) {
    try {
      PassCost pc =
          eval_pass(design, workload, batch, Stage::Decode, seq, kv_mid);
      double steps = static_cast<double>(gen) * flavor.num_passes;
      double tokens = static_cast<double>(gen) * batch;
      StageResult res = assemble(design, workload, "decode", pc, steps, tokens,
                                 batch, /*tile_passes=*/false);
      return res;
    } catch (const InfeasibleError& e) {
      if (e.kind() == InfeasibleError::Kind::Capacity && batch > 1) {
        --batch;
        continue;
      }
      throw;
    }
  }
}

StageResult eval_pd_combined(const StageResult& prefill,
                             const StageResult& decode, double kv_bytes,
                             double link_bandwidth_bytes_per_s,
                             const MemoryPowerCoefficients& sender,
                             const MemoryPowerCoefficients& receiver) {
  if (!(link_bandwidth_bytes_per_s > 0.0)) {
    throw ValidationError("pd link bandwidth must be positive");
  }
  StageResult res;
  res.stage = "combined";
  const double handoff_s = kv_bytes / link_bandwidth_bytes_per_s;
  res.latency_s = prefill.latency_s + handoff_s + decode.latency_s;
  res.tokens = prefill.tokens + decode.tokens;
  res.tps = decode.tps;  // steady-state generation rate
  res.batch = decode.batch;

  const double e_prefill = prefill.power.avg_power_w * prefill.latency_s;
  const double e_decode = decode.power.avg_power_w * decode.latency_s;
  const double e_transfer = kv_bytes * units::kBitsPerByte *
                            (sender.e_read_j_per_bit + receiver.e_write_j_per_bit);
  res.energy_per_token_j =
      res.tokens > 0.0 ? (e_prefill + e_transfer + e_decode) / res.tokens : 0.0;
  res.power.avg_power_w =
      res.latency_s > 0.0
          ? (e_prefill + e_transfer + e_decode) / res.latency_s
          : 0.0;
  res.power.tdp_w = prefill.power.tdp_w + decode.power.tdp_w;
  res.power.compute_w = 0.0;
  res.notes = "two-device disaggregated total; per-tier power lives in the stage results";
  return res;
}

std::vector<std::pair<std::string, StageResult>> stage_breakdown(
    const DesignPoint& design, const Workload& workload) {
  std::vector<std::pair<std::string, StageResult>> slices;
  const ModelSpec& m = workload.model;
  const WorkloadTrace& trace = workload.trace;
  const PassPlan flavor = expand_workload_flavor(m, trace);

  const long long seq =
      flavor.full_sequence ? trace.total_tokens() : trace.prompt_tokens;
  PassCost pre = eval_pass(design, workload, 1, Stage::Prefill, seq, seq);
  slices.emplace_back(
      "prefill-attention",
      assemble(design, workload, "prefill", pre, flavor.num_passes,
               static_cast<double>(seq), 1, true, true, false));
  slices.emplace_back(
      "prefill-ffn",
      assemble(design, workload, "prefill", pre, flavor.num_passes,
               static_cast<double>(seq), 1, true, false, true));

  const long long gen = trace.generated_tokens;
  if (gen > 0) {
    long long batch =
        decode_max_batch(m, design.precision, trace, design.hierarchy);
    if (batch < 1) {
      throw InfeasibleError(InfeasibleError::Kind::Decode,
                            "decode slices: no batch fits");
    }
    const long long dseq = flavor.full_sequence ? trace.total_tokens() : 1;
    auto decode_slice = [&](const char* name, long long kv_len,
                            long long tokens_in_slice) {
      PassCost pc = eval_pass(design, workload, batch, Stage::Decode, dseq, kv_len);
      double steps = static_cast<double>(tokens_in_slice) * flavor.num_passes;
      slices.emplace_back(
          name, assemble(design, workload, "decode", pc, steps,
                         static_cast<double>(tokens_in_slice) * batch, batch,
                         /*tile_passes=*/false));
    };
    decode_slice("decode-early", trace.prompt_tokens + gen / 4, gen / 2);
    decode_slice("decode-late", trace.prompt_tokens + 3 * gen / 4,
                 gen - gen / 2);
  }
  return slices;
}

StageResult evaluate_stage(const DesignPoint& design, const Workload& workload,
                           Stage stage) {
  switch (stage) {
    case Stage::Prefill: return eval_prefill(design, workload);
    case Stage::Decode: return eval_decode(design, workload);
    case Stage::Combined: {
      StageResult p = eval_prefill(design, workload);
      StageResult d = eval_decode(design, workload);
      Footprints f = tensor_footprints(workload.model, design.precision,
                                       workload.trace, 1);
      const double kv_prompt =
          workload.trace.total_tokens() > 0
              ? f.kv_bytes_per_seq * workload.trace.prompt_tokens /
                    workload.trace.total_tokens()
              : 0.0;
      const auto deepest =
          MemoryPowerCoefficients::from(design.hierarchy.tiers.back().tech);
      return eval_pd_combined(p, d, kv_prompt, 900.0 * units::kGiga, deepest,
                              deepest);
    }
  }
  throw ValidationError("unknown stage");
}

}  // namespace memx
