// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Structured configs cross the boundary as JSON text; the
// package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "memexplorer/dse.hpp"
#include "memexplorer/errors.hpp"
#include "memexplorer/evaluator.hpp"
#include "memexplorer/io_json.hpp"
#include "memexplorer/transfer_sim.hpp"
#include "memexplorer/units.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

memx::Catalog catalog_from_arg(const std::string& catalog_json) {
  if (catalog_json.empty()) return memx::default_catalog();
  return memx::load_catalog(catalog_json);
}

std::string eval_stage_json(const std::string& design_json,
                            const std::string& workload_json,
                            const std::string& stage,
                            const std::string& catalog_json) {
  const memx::Catalog catalog = catalog_from_arg(catalog_json);
  const json ddoc = json::parse(design_json);
  memx::Workload workload = memx::workload_from_json(json::parse(workload_json));
  memx::DesignPoint design = memx::design_from_json(ddoc, catalog);
  if (!ddoc.contains("precision")) design.precision = workload.precision;
  if (stage == "breakdown") {
    json out = json::array();
    for (const auto& [name, slice] : memx::stage_breakdown(design, workload)) {
      json s = memx::stage_result_to_json(slice);
      s["slice"] = name;
      out.push_back(s);
    }
    return out.dump();
  }
  memx::Stage st = stage == "prefill"   ? memx::Stage::Prefill
                   : stage == "decode"  ? memx::Stage::Decode
                                        : memx::Stage::Combined;
  return memx::stage_result_to_json(memx::evaluate_stage(design, workload, st))
      .dump();
}

std::string footprints_json(const std::string& workload_json, long long batch) {
  memx::Workload w = memx::workload_from_json(json::parse(workload_json));
  memx::Footprints f =
      memx::tensor_footprints(w.model, w.precision, w.trace, batch);
  return json{{"weights_bytes", f.weights_bytes},
              {"kv_bytes_per_seq", f.kv_bytes_per_seq},
              {"act_bytes_peak", f.act_bytes_peak},
              {"act_bytes_total", f.act_bytes_total},
              {"total_bytes", f.total_bytes}}
      .dump();
}

std::string validate_oracle_json(std::size_t cases, std::uint64_t seed,
                                 double tolerance, double chunk_bytes) {
  const memx::OracleReport r = memx::validate_against_analytic(
      cases, seed, tolerance, memx::default_catalog(), chunk_bytes);
  return json{{"max_rel_err", r.max_rel_err},
              {"mean_rel_err", r.mean_rel_err},
              {"failures", r.failures.size()},
              {"cases", r.cases.size()}}
      .dump();
}

std::string run_dse_json(const std::string& workload_json,
                         const std::string& stage, const std::string& method,
                         std::size_t budget, std::size_t n_init,
                         std::uint64_t seed, double tdp,
                         std::size_t pool_size) {
  const memx::Catalog& catalog = memx::default_catalog();
  memx::DesignSpace space = memx::DesignSpace::standard();
  memx::Workload workload = memx::workload_from_json(json::parse(workload_json));
  memx::DseConfig cfg;
  cfg.method = memx::dse_method_from(method);
  cfg.n_init = n_init;
  cfg.n_total = budget;
  cfg.seed = seed;
  cfg.tdp_budget_w = tdp;
  cfg.pool_size = pool_size;
  cfg.stage = stage == "decode" ? memx::Stage::Decode : memx::Stage::Prefill;
  memx::DseResult res = memx::run_dse(space, workload, cfg, catalog);
  json steps = json::array();
  for (const auto& s : res.history.steps) {
    steps.push_back({{"step", s.step},
                     {"design_id", s.design_id},
                     {"throughput_tps", s.objectives.throughput_tps},
                     {"power_w", s.objectives.power_w},
                     {"hv", s.hv_after}});
  }
  json front = json::array();
  for (const auto& e : res.archive.entries()) {
    front.push_back({{"design_id", e.design_id},
                     {"throughput_tps", e.objectives.throughput_tps},
                     {"power_w", e.objectives.power_w}});
  }
  return json{{"method", res.history.method},
              {"seed", res.history.seed},
              {"steps", steps},
              {"pareto_front", front},
              {"final_hv", res.history.steps.back().hv_after}}
      .dump();
}

double hypervolume_py(const std::vector<std::pair<double, double>>& points,
                      double ref_tps, double ref_power) {
  std::vector<memx::ObjectiveVector> objs;
  objs.reserve(points.size());
  for (const auto& [tps, p] : points) objs.push_back({tps, p});
  return memx::hypervolume(objs, {ref_tps, ref_power});
}

double ehvi_py(double mean_tps, double mean_power, double std_tps,
               double std_power,
               const std::vector<std::pair<double, double>>& front,
               double ref_tps, double ref_power) {
  std::vector<memx::ObjectiveVector> f;
  f.reserve(front.size());
  for (const auto& [tps, p] : front) f.push_back({tps, p});
  return memx::ehvi({mean_tps, mean_power}, std_tps, std_power, f,
                    {ref_tps, ref_power});
}

double max_stacks_py(const std::string& tech, double l_mem_mm,
                     double l_margin_mm) {
  const memx::Catalog& cat = memx::default_catalog();
  auto it = cat.find(tech);
  if (it == cat.end()) throw memx::ValidationError("unknown technology " + tech);
  return memx::max_stacks(it->second, {l_mem_mm, l_margin_mm});
}

std::string transfer_time_json(const std::string& tiers_json, double bytes,
                               const std::vector<double>& placement) {
  const memx::Catalog& cat = memx::default_catalog();
  memx::HierarchySpec spec;
  for (const auto& t : json::parse(tiers_json)) {
    spec.tiers.push_back(memx::TierInstance{
        cat.at(t["tech"].get<std::string>()), t.value("units", 1)});
  }
  memx::TransferRequest req{bytes, placement};
  const auto eff = memx::effective_bandwidths(spec);
  json out;
  out["effective_bandwidth_gb_s"] = json::array();
  for (double b : eff) out["effective_bandwidth_gb_s"].push_back(b / 1e9);
  out["analytic_s"] = memx::total_transfer_time(req, spec, eff);
  memx::OracleConfig oc;
  oc.hierarchy = spec;
  oc.placement = req;
  out["simulated_s"] = memx::simulate_transfer(oc);
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "heterogeneous NPU memory system co-design models";
  m.attr("__version__") = "0.1.0";

  m.def("default_catalog_json", &memx::default_catalog_json,
        "Bundled memory technology registry as JSON text");
  m.def("max_stacks", &max_stacks_py, py::arg("tech"),
        py::arg("l_mem_mm") = 66.0, py::arg("l_margin_mm") = 1.0,
        "Maximum attachable stacks under a die-edge budget");
  m.def("transfer_time_json", &transfer_time_json, py::arg("tiers_json"),
        py::arg("bytes"), py::arg("placement"),
        "Analytic + simulated transfer time for a hierarchy/placement");
  m.def("footprints_json", &footprints_json, py::arg("workload_json"),
        py::arg("batch") = 1);
  m.def("eval_stage_json", &eval_stage_json, py::arg("design_json"),
        py::arg("workload_json"), py::arg("stage") = "prefill",
        py::arg("catalog_json") = "");
  m.def("validate_oracle_json", &validate_oracle_json, py::arg("cases") = 50,
        py::arg("seed") = 7, py::arg("tolerance") = 0.02,
        py::arg("chunk_bytes") = 1048576.0);
  m.def("hypervolume", &hypervolume_py, py::arg("points"),
        py::arg("ref_tps") = 0.0, py::arg("ref_power") = 700.0,
        "2-D hypervolume, throughput maximized / power minimized");
  m.def("ehvi", &ehvi_py, py::arg("mean_tps"), py::arg("mean_power"),
        py::arg("std_tps"), py::arg("std_power"), py::arg("front"),
        py::arg("ref_tps") = 0.0, py::arg("ref_power") = 700.0,
        "Analytic expected hypervolume improvement");
  m.def("run_dse_json", &run_dse_json, py::arg("workload_json"),
        py::arg("stage") = "prefill", py::arg("method") = "ehvi",
        py::arg("budget") = 40, py::arg("n_init") = 10, py::arg("seed") = 0,
        py::arg("tdp") = 700.0, py::arg("pool_size") = 256);

  py::register_exception<memx::InfeasibleError>(m, "InfeasibleError");
  py::register_exception<memx::ValidationError>(m, "ValidationError");
  py::register_exception<memx::ParseError>(m, "ParseError");
}
