// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/io_json.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "memexplorer/errors.hpp"
#include "memexplorer/units.hpp"

namespace memx {

using nlohmann::json;

namespace {

const json& need(const json& doc, const char* field, const char* ctx) {
  if (!doc.contains(field)) {
    throw ParseError(std::string(ctx) + ": missing field '" + field + "'");
  }
  return doc[field];
}

template <typename T>
T get_or(const json& doc, const char* field, T fallback) {
  return doc.contains(field) ? doc[field].get<T>() : fallback;
}

Stage stage_from(const std::string& s) {
  if (s == "prefill") return Stage::Prefill;
  if (s == "decode") return Stage::Decode;
  if (s == "combined") return Stage::Combined;
  throw ParseError("unknown stage '" + s + "'");
}

PrecisionConfig precision_from(const json& doc) {
  PrecisionConfig p;
  p.weight_bits = get_or(doc, "weight_bits", 8);
  p.activation_bits = get_or(doc, "activation_bits", 8);
  p.kv_bits = get_or(doc, "kv_bits", 8);
  p.validate();
  return p;
}

}  // namespace

Workload workload_from_json(const json& doc) {
  Workload w;
  const json& m = need(doc, "model", "workload");
  w.model.name = get_or<std::string>(m, "name", "unnamed");
  w.model.num_layers = need(m, "num_layers", "model").get<int>();
  w.model.hidden_dim = need(m, "hidden_dim", "model").get<int>();
  w.model.num_heads = need(m, "num_heads", "model").get<int>();
  w.model.num_kv_heads = need(m, "num_kv_heads", "model").get<int>();
  w.model.head_dim = need(m, "head_dim", "model").get<int>();
  w.model.ffn_dim = need(m, "ffn_dim", "model").get<int>();
  w.model.vocab_size = need(m, "vocab_size", "model").get<long long>();
  if (m.contains("moe")) {
    MoeConfig moe;
    const json& j = m["moe"];
    moe.total_params = need(j, "total_params", "moe").get<double>();
    moe.active_params_per_token =
        need(j, "active_params_per_token", "moe").get<double>();
    moe.num_experts = get_or(j, "num_experts", 0);
    moe.experts_per_token = get_or(j, "experts_per_token", 0);
    w.model.moe = moe;
  }
  if (m.contains("diffusion_steps")) {
    w.model.diffusion_steps = m["diffusion_steps"].get<int>();
  }
  w.model.validate();

  const json& t = need(doc, "trace", "workload");
  w.trace.prompt_tokens = need(t, "prompt_tokens", "trace").get<long long>();
  w.trace.generated_tokens = need(t, "generated_tokens", "trace").get<long long>();
  w.trace.stage = stage_from(get_or<std::string>(t, "stage", "prefill"));
  w.trace.validate();

  if (doc.contains("precision")) w.precision = precision_from(doc["precision"]);
  return w;
}

DesignPoint design_from_json(const json& doc, const Catalog& catalog) {
  DesignPoint d;
  const json& c = need(doc, "compute", "design");
  d.compute.pe_rows = need(c, "pe_rows", "compute").get<int>();
  d.compute.pe_cols = need(c, "pe_cols", "compute").get<int>();
  d.compute.vlen = need(c, "vlen", "compute").get<int>();
  d.compute.clock_hz = get_or(c, "clock_hz", 1e9);
  d.compute.validate();

  const json& h = need(doc, "hierarchy", "design");
  if (!h.is_array() || h.empty()) {
    throw ParseError("design: hierarchy must be a non-empty array of tiers");
  }
  for (const auto& tier : h) {
    const std::string tech = need(tier, "tech", "tier").get<std::string>();
    auto it = catalog.find(tech);
    if (it == catalog.end()) {
      throw ValidationError("design: unknown technology '" + tech + "'");
    }
    d.hierarchy.tiers.push_back(
        TierInstance{it->second, get_or(tier, "units", 1)});
  }
  d.hierarchy.validate();

  if (doc.contains("precision")) d.precision = precision_from(doc["precision"]);

  if (doc.contains("strategy")) {
    const json& s = doc["strategy"];
    const std::string df = get_or<std::string>(s, "dataflow", "WS");
    d.strategy.dataflow = df == "WS"   ? Dataflow::WS
                          : df == "IS" ? Dataflow::IS
                          : df == "OS" ? Dataflow::OS
                                       : throw ParseError("design: unknown dataflow '" + df + "'");
    const std::string sp = get_or<std::string>(s, "storage_priority", "Equal");
    d.strategy.storage_priority =
        sp == "Activation" ? StoragePriority::Activation
        : sp == "KVCache"  ? StoragePriority::KVCache
        : sp == "Weight"   ? StoragePriority::Weight
        : sp == "Equal"    ? StoragePriority::Equal
                           : throw ParseError("design: unknown storage_priority '" + sp + "'");
    const std::string bw = get_or<std::string>(s, "bw_priority", "Equal");
    d.strategy.bw_priority =
        bw == "Matrix"   ? BwPriority::Matrix
        : bw == "Vector" ? BwPriority::Vector
        : bw == "Equal"  ? BwPriority::Equal
                         : throw ParseError("design: unknown bw_priority '" + bw + "'");
  }

  d.power = calibrated_compute_power();
  if (doc.contains("compute_power")) {
    const json& p = doc["compute_power"];
    d.power.p_static_w = get_or(p, "p_static_w", d.power.p_static_w);
    d.power.p_mac_peak_w = get_or(p, "p_mac_peak_w", d.power.p_mac_peak_w);
    d.power.p_vec_peak_w = get_or(p, "p_vec_peak_w", d.power.p_vec_peak_w);
    d.power.clock_hz = get_or(p, "clock_hz", d.power.clock_hz);
    d.power.validate();
  }
  d.id = get_or<std::string>(doc, "id", "design");
  return d;
}

json design_to_json(const DesignPoint& d) {
  json doc;
  doc["id"] = d.id;
  doc["compute"] = {{"pe_rows", d.compute.pe_rows},
                    {"pe_cols", d.compute.pe_cols},
                    {"vlen", d.compute.vlen},
                    {"clock_hz", d.compute.clock_hz}};
  doc["hierarchy"] = json::array();
  for (const auto& t : d.hierarchy.tiers) {
    doc["hierarchy"].push_back({{"tech", t.tech.name}, {"units", t.units}});
  }
  doc["precision"] = {{"weight_bits", d.precision.weight_bits},
                      {"activation_bits", d.precision.activation_bits},
                      {"kv_bits", d.precision.kv_bits}};
  doc["strategy"] = {{"dataflow", to_string(d.strategy.dataflow)},
                     {"storage_priority", to_string(d.strategy.storage_priority)},
                     {"bw_priority", to_string(d.strategy.bw_priority)}};
  doc["compute_power"] = {{"p_static_w", d.power.p_static_w},
                          {"p_mac_peak_w", d.power.p_mac_peak_w},
                          {"p_vec_peak_w", d.power.p_vec_peak_w},
                          {"clock_hz", d.power.clock_hz}};
  return doc;
}

DesignSpace space_from_json(const json& doc) {
  DesignSpace space = DesignSpace::standard();
  if (doc.is_null()) return space;
  if (!doc.is_object()) throw ParseError("space: document must be an object");
  for (const auto& [name, values] : doc.items()) {
    if (!values.is_array()) {
      throw ParseError("space: dimension '" + name + "' must map to an array");
    }
    std::vector<std::string> vals;
    for (const auto& v : values) {
      vals.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    space.restrict_dim(name, vals);
  }
  return space;
}

json stage_result_to_json(const StageResult& r) {
  json doc;
  doc["stage"] = r.stage;
  doc["latency_s"] = r.latency_s;
  doc["tokens"] = r.tokens;
  doc["tps"] = r.tps;
  doc["batch"] = r.batch;
  doc["energy_per_token_j"] = r.energy_per_token_j;
  doc["matrix_utilization"] = r.matrix_utilization;
  doc["vector_utilization"] = r.vector_utilization;
  doc["passes"] = r.passes;
  doc["power"] = {{"avg_w", r.power.avg_power_w},
                  {"tdp_w", r.power.tdp_w},
                  {"compute_w", r.power.compute_w}};
  doc["power"]["per_tier"] = json::array();
  for (const auto& t : r.power.per_tier) {
    doc["power"]["per_tier"].push_back({{"tier", t.tier},
                                        {"background_w", t.background_w},
                                        {"read_w", t.read_w},
                                        {"write_w", t.write_w}});
  }
  doc["per_layer"] = json::array();
  for (const auto& l : r.per_layer) {
    doc["per_layer"].push_back({{"kind", l.kind},
                                {"compute_s", l.compute_s},
                                {"vector_s", l.vector_s},
                                {"transfer_s", l.transfer_s},
                                {"latency_s", l.latency_s},
                                {"bound", l.memory_bound ? "memory" : "compute"}});
  }
  if (!r.notes.empty()) doc["notes"] = r.notes;
  return doc;
}

json frontier_row_to_json(const FrontierRow& row) {
  return json{{"design_id", row.design_id}, {"pe_array", row.pe_array},
              {"vlen", row.vlen},           {"onchip", row.onchip},
              {"l1", row.l1},               {"l2", row.l2},
              {"l3", row.l3},               {"storage", row.storage},
              {"exec", row.exec},           {"bw", row.bw},
              {"avg_w", row.avg_w},         {"tdp_w", row.tdp_w},
              {"batch", row.batch},         {"tps", row.tps},
              {"tokens_per_joule", row.tokens_per_joule}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("file '" + path + "': invalid JSON: " + e.what());
  }
  return doc;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // LF endings on every platform
  if (!out) throw ParseError("cannot write file '" + path + "'");
  out << content;
}

std::string csv_double(double v) {
  char buf[64];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
  }
  // shortest representation that round-trips
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

std::string history_csv(const DseHistory& history) {
  std::ostringstream os;
  os << "step,hv,throughput_tps,power_w,design_id\n";
  for (const auto& s : history.steps) {
    os << s.step << "," << csv_double(s.hv_after) << ","
       << csv_double(s.objectives.throughput_tps) << ","
       << csv_double(s.objectives.power_w) << "," << s.design_id << "\n";
  }
  return os.str();
}

std::string frontier_csv(const std::vector<FrontierRow>& rows) {
  std::ostringstream os;
  os << "design_id,pe_array,vlen,onchip,l1,l2,l3,storage,exec,bw,avg_w,tdp_w,"
        "batch,tps,tokens_per_joule\n";
  for (const auto& r : rows) {
    os << r.design_id << "," << r.pe_array << "," << r.vlen << "," << r.onchip
       << "," << r.l1 << "," << r.l2 << "," << r.l3 << "," << r.storage << ","
       << r.exec << "," << r.bw << "," << csv_double(r.avg_w) << ","
       << csv_double(r.tdp_w) << "," << r.batch << "," << csv_double(r.tps)
       << "," << csv_double(r.tokens_per_joule) << "\n";
  }
  return os.str();
}

std::string pareto_points_csv(const DseResult& result, double tdp_budget_w) {
  std::map<std::string, const EvaluatedDesign*> by_id;
  for (const auto& d : result.history.evaluated) by_id[d.design_id] = &d;
  std::ostringstream os;
  os << "design_id,throughput_tps,power_w,tokens_per_j,feasible\n";
  for (const auto& e : result.archive.entries()) {
    auto it = by_id.find(e.design_id);
    const double tdp = it != by_id.end() ? it->second->tdp_w : 0.0;
    os << e.design_id << "," << csv_double(e.objectives.throughput_tps) << ","
       << csv_double(e.objectives.power_w) << ","
       << csv_double(e.objectives.power_w > 0.0
                         ? e.objectives.throughput_tps / e.objectives.power_w
                         : 0.0)
       << "," << (tdp <= tdp_budget_w ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string hv_summary_csv(const std::vector<DseHistory>& histories) {
  // method -> step -> hv values across seeds
  std::map<std::string, std::map<std::size_t, std::vector<double>>> agg;
  for (const auto& h : histories) {
    for (const auto& s : h.steps) agg[h.method][s.step].push_back(s.hv_after);
  }
  std::ostringstream os;
  os << "method,step,hv_mean,hv_std,seeds\n";
  for (const auto& [method, steps] : agg) {
    for (const auto& [step, values] : steps) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
      os << method << "," << step << "," << csv_double(mean) << ","
         << csv_double(std::sqrt(var)) << "," << values.size() << "\n";
    }
  }
  return os.str();
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace memx
