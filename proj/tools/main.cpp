// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
//
// memexplorer: heterogeneous NPU memory system modeling and design space
// exploration. Subcommands: catalog, eval, validate, explore, report.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "memexplorer/dse.hpp"
#include "memexplorer/errors.hpp"
#include "memexplorer/evaluator.hpp"
#include "memexplorer/io_json.hpp"
#include "memexplorer/transfer_sim.hpp"
#include "memexplorer/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitEmptyArchive = 4;

memx::Catalog resolve_catalog(const std::string& flag_path) {
  if (!flag_path.empty()) return memx::load_catalog_file(flag_path);
  if (const char* env = std::getenv("MEMEXPLORER_CATALOG")) {
    return memx::load_catalog_file(env);
  }
  return memx::default_catalog();
}

std::string file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw memx::ParseError("cannot open file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json manifest_base(const std::string& command) {
  json m;
  m["command"] = command;
  m["tool_version"] = kVersion;
  const auto now = std::chrono::system_clock::now();
  m["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return m;
}

int cmd_catalog_list(const std::string& catalog_path) {
  const memx::Catalog cat = resolve_catalog(catalog_path);
  std::cout << "name      kind     latency_ns  capacity_gb  bandwidth_gb_s  "
               "shoreline_mm  p_bg_mw_gb  e_read_pj  e_write_pj\n";
  for (const auto& [name, t] : cat) {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%-9s %-8s %10.1f %12.3f %15.1f %13s %11.2f %10.2f %11.2f",
                  name.c_str(),
                  t.kind == memx::MemoryKind::OnChip ? "onchip" : "offchip",
                  t.latency_s / memx::units::kNanoseconds,
                  t.capacity_bytes / memx::units::kGiga,
                  t.bandwidth_bytes_per_s / memx::units::kGiga,
                  t.shoreline_mm ? std::to_string(*t.shoreline_mm).substr(0, 6).c_str()
                                 : "-",
                  t.p_bg_w_per_byte * memx::units::kGiga / memx::units::kMilliwatt,
                  t.e_read_j_per_bit / memx::units::kPicojoule,
                  t.e_write_j_per_bit / memx::units::kPicojoule);
    std::cout << line << "\n";
  }
  return kExitOk;
}

int cmd_catalog_validate(const std::string& path) {
  memx::Catalog cat = memx::load_catalog_file(path);
  std::cout << "ok: " << cat.size() << " technologies\n";
  return kExitOk;
}

void require_integration_feasible(const memx::DesignPoint& design,
                                  const memx::Catalog& catalog) {
  const auto report =
      memx::validate_hierarchy(design.hierarchy, catalog,
                               memx::ShorelineBudget{}, /*constrained=*/false);
  if (!report.feasible) {
    std::string msg = "hierarchy violates physical integration limits";
    for (const auto& v : report.violations) msg += "; " + v;
    msg += " (die-edge budget " + std::to_string(report.shoreline_limit_mm) +
           " mm; pass --unconstrained to evaluate anyway)";
    throw memx::InfeasibleError(memx::InfeasibleError::Kind::Capacity, msg);
  }
}

int cmd_eval(const std::string& design_path, const std::string& workload_path,
             const std::string& stage_name, const std::string& out_path,
             const std::string& decode_design_path, double link_gbps,
             bool unconstrained, const std::string& catalog_path) {
  const memx::Catalog catalog = resolve_catalog(catalog_path);
  const json design_doc = memx::load_json_file(design_path);
  const json workload_doc = memx::load_json_file(workload_path);
  memx::Workload workload = memx::workload_from_json(workload_doc);
  memx::DesignPoint design = memx::design_from_json(design_doc, catalog);
  if (!design_doc.contains("precision")) design.precision = workload.precision;
  if (!unconstrained) require_integration_feasible(design, catalog);

  json out;
  if (stage_name == "prefill") {
    out = memx::stage_result_to_json(memx::eval_prefill(design, workload));
  } else if (stage_name == "decode") {
    out = memx::stage_result_to_json(memx::eval_decode(design, workload));
  } else if (stage_name == "combined") {
    memx::StageResult pre = memx::eval_prefill(design, workload);
    memx::DesignPoint decode_design = design;
    if (!decode_design_path.empty()) {
      const json dd = memx::load_json_file(decode_design_path);
      decode_design = memx::design_from_json(dd, catalog);
      if (!dd.contains("precision")) decode_design.precision = workload.precision;
      if (!unconstrained) require_integration_feasible(decode_design, catalog);
    }
    memx::StageResult dec = memx::eval_decode(decode_design, workload);
    const memx::Footprints f = memx::tensor_footprints(
        workload.model, design.precision, workload.trace, 1);
    const double kv_prompt =
        workload.trace.total_tokens() > 0
            ? f.kv_bytes_per_seq * workload.trace.prompt_tokens /
                  workload.trace.total_tokens()
            : 0.0;
    const auto sender =
        memx::MemoryPowerCoefficients::from(design.hierarchy.tiers.back().tech);
    const auto receiver = memx::MemoryPowerCoefficients::from(
        decode_design.hierarchy.tiers.back().tech);
    memx::StageResult sys = memx::eval_pd_combined(
        pre, dec, kv_prompt, link_gbps * memx::units::kGiga, sender, receiver);
    out = memx::stage_result_to_json(sys);
    out["prefill"] = memx::stage_result_to_json(pre);
    out["decode"] = memx::stage_result_to_json(dec);
    out["kv_handoff_bytes"] = kv_prompt;
  } else if (stage_name == "breakdown") {
    out["slices"] = json::array();
    for (const auto& [name, slice] : memx::stage_breakdown(design, workload)) {
      json s = memx::stage_result_to_json(slice);
      s["slice"] = name;
      out["slices"].push_back(s);
    }
  } else {
    throw memx::ValidationError("unknown stage '" + stage_name + "'");
  }

  memx::write_text_file(out_path, out.dump(2) + "\n");
  json manifest = manifest_base("eval");
  manifest["flags"] = {{"design", design_path},
                       {"workload", workload_path},
                       {"stage", stage_name},
                       {"out", out_path}};
  manifest["inputs"] = {{"design", memx::content_hash(file_text(design_path))},
                        {"workload", memx::content_hash(file_text(workload_path))}};
  memx::write_text_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_validate(std::size_t cases, std::uint64_t seed, double tolerance,
                 double chunk_mib, const std::string& out_path,
                 const std::string& catalog_path) {
  const memx::Catalog catalog = resolve_catalog(catalog_path);
  const memx::OracleReport report = memx::validate_against_analytic(
      cases, seed, tolerance, catalog, chunk_mib * memx::units::kMiB);
  json doc;
  doc["cases"] = cases;
  doc["seed"] = seed;
  doc["tolerance"] = tolerance;
  doc["chunk_mib"] = chunk_mib;
  doc["max_rel_err"] = report.max_rel_err;
  doc["mean_rel_err"] = report.mean_rel_err;
  doc["failures"] = json::array();
  for (const auto& c : report.failures) {
    doc["failures"].push_back({{"case", c.index},
                               {"hierarchy", c.hierarchy_desc},
                               {"payload_bytes", c.payload_bytes},
                               {"analytic_s", c.analytic_s},
                               {"simulated_s", c.simulated_s},
                               {"rel_err", c.rel_err}});
  }
  if (!out_path.empty()) memx::write_text_file(out_path, doc.dump(2) + "\n");
  std::cout << "oracle comparison: max_rel_err=" << report.max_rel_err
            << " mean_rel_err=" << report.mean_rel_err << " failures="
            << report.failures.size() << "/" << cases << "\n";
  return report.failures.empty() ? kExitOk : kExitValidation;
}

int cmd_explore(const std::string& space_path, const std::string& workload_path,
                const std::string& stage_name, const std::string& method_name,
                std::size_t budget, std::size_t n_init, std::size_t n_seeds,
                std::uint64_t seed_base, double tdp, std::size_t pool,
                const std::string& out_dir, const std::string& catalog_path) {
  const memx::Catalog catalog = resolve_catalog(catalog_path);
  memx::DesignSpace space =
      space_path.empty() ? memx::DesignSpace::standard()
                         : memx::space_from_json(memx::load_json_file(space_path));
  const memx::Workload workload =
      memx::workload_from_json(memx::load_json_file(workload_path));

  std::vector<memx::DseMethod> methods;
  if (method_name == "all") {
    methods = {memx::DseMethod::Ehvi, memx::DseMethod::Nsga2,
               memx::DseMethod::Random};
  } else {
    methods = {memx::dse_method_from(method_name)};
  }
  const memx::Stage stage = stage_name == "prefill" ? memx::Stage::Prefill
                            : stage_name == "decode"
                                ? memx::Stage::Decode
                                : throw memx::ValidationError(
                                      "explore stage must be prefill or decode");

  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "designs");

  std::vector<memx::DseHistory> histories;
  memx::ParetoArchive merged(memx::ObjectiveVector{0.0, tdp});
  json archive_doc = json::array();
  std::vector<memx::EvaluatedDesign> all_designs;

  for (memx::DseMethod method : methods) {
    for (std::size_t s = 0; s < n_seeds; ++s) {
      memx::DseConfig cfg;
      cfg.method = method;
      cfg.n_init = n_init;
      cfg.n_total = budget;
      cfg.seed = seed_base + s;
      cfg.tdp_budget_w = tdp;
      cfg.pool_size = pool;
      cfg.stage = stage;
      memx::DseResult result;
      try {
        result = memx::run_dse(space, workload, cfg, catalog);
      } catch (const std::exception& e) {
        std::cerr << "explore: seed " << cfg.seed << " method "
                  << memx::to_string(method) << " failed: " << e.what() << "\n";
        throw;
      }
      const std::string name = std::string("history_") +
                               memx::to_string(method) + "_" +
                               std::to_string(cfg.seed) + ".csv";
      memx::write_text_file((fs::path(out_dir) / name).string(),
                            memx::history_csv(result.history));
      histories.push_back(result.history);
      for (const auto& e : result.archive.entries()) merged.insert(e);
      for (const auto& d : result.history.evaluated) {
        all_designs.push_back(d);
        const std::string dpath =
            (fs::path(out_dir) / "designs" / (d.design_id + ".json")).string();
        if (!fs::exists(dpath)) {
          json ddoc = memx::design_to_json(space.decode(d.point, catalog));
          ddoc["objectives"] = {{"throughput_tps", d.objectives.throughput_tps},
                                {"power_w", d.objectives.power_w},
                                {"tdp_w", d.tdp_w},
                                {"batch", d.batch},
                                {"tokens_per_joule", d.tokens_per_joule}};
          memx::write_text_file(dpath, ddoc.dump(2) + "\n");
        }
      }
      std::cout << "method=" << memx::to_string(method) << " seed=" << cfg.seed
                << " final_hv=" << result.history.steps.back().hv_after << "\n";
    }
  }

  memx::write_text_file((fs::path(out_dir) / "hv_summary.csv").string(),
                        memx::hv_summary_csv(histories));

  // Merged archive + frontier across every run in this invocation.
  memx::DseResult merged_result{memx::DseHistory{}, merged};
  merged_result.history.evaluated = all_designs;
  const auto rows = memx::pareto_report(merged_result, space, catalog,
                                        merged.entries().size(), tdp);
  memx::write_text_file((fs::path(out_dir) / "frontier.csv").string(),
                        memx::frontier_csv(rows));
  for (const auto& e : merged.entries()) {
    archive_doc.push_back({{"design_id", e.design_id},
                           {"throughput_tps", e.objectives.throughput_tps},
                           {"power_w", e.objectives.power_w}});
  }
  json archive_file;
  archive_file["reference"] = {{"throughput_tps", 0.0}, {"power_w", tdp}};
  archive_file["entries"] = archive_doc;
  json designs_meta = json::array();
  for (const auto& d : all_designs) {
    designs_meta.push_back({{"design_id", d.design_id},
                            {"throughput_tps", d.objectives.throughput_tps},
                            {"power_w", d.objectives.power_w},
                            {"tdp_w", d.tdp_w},
                            {"batch", d.batch},
                            {"tokens_per_joule", d.tokens_per_joule}});
  }
  archive_file["evaluated"] = designs_meta;
  memx::write_text_file((fs::path(out_dir) / "archive.json").string(),
                        archive_file.dump(2) + "\n");

  json manifest = manifest_base("explore");
  manifest["flags"] = {{"space", space_path},   {"workload", workload_path},
                       {"stage", stage_name},   {"method", method_name},
                       {"budget", budget},      {"n_init", n_init},
                       {"seeds", n_seeds},      {"seed_base", seed_base},
                       {"tdp", tdp},            {"pool", pool},
                       {"out", out_dir}};
  manifest["inputs"] = {
      {"workload", memx::content_hash(file_text(workload_path))},
      {"space", space_path.empty() ? "builtin" : memx::content_hash(file_text(space_path))}};
  memx::write_text_file((fs::path(out_dir) / "manifest.json").string(),
                        manifest.dump(2) + "\n");
  return kExitOk;
}

int cmd_report(const std::string& run_dir, double tdp, std::size_t top,
               const std::string& catalog_path) {
  const memx::Catalog catalog = resolve_catalog(catalog_path);
  const json archive_file =
      memx::load_json_file((fs::path(run_dir) / "archive.json").string());
  if (!archive_file.contains("entries") || archive_file["entries"].empty()) {
    std::cerr << "report: archive is empty\n";
    return kExitEmptyArchive;
  }
  memx::DesignSpace space = memx::DesignSpace::standard();
  memx::ParetoArchive archive(memx::ObjectiveVector{0.0, tdp});
  memx::DseResult result{memx::DseHistory{}, archive};
  for (const auto& e : archive_file["entries"]) {
    result.archive.insert({e["design_id"].get<std::string>(),
                           {e["throughput_tps"].get<double>(),
                            e["power_w"].get<double>()}});
  }
  for (const auto& d : archive_file["evaluated"]) {
    memx::EvaluatedDesign ed;
    ed.design_id = d["design_id"].get<std::string>();
    // Lattice coordinates are embedded in the id ("d-i0-i1-...").
    std::stringstream ss(ed.design_id.substr(1));
    std::string tok;
    while (std::getline(ss, tok, '-')) {
      if (!tok.empty()) ed.point.idx.push_back(std::stoi(tok));
    }
    ed.objectives = {d["throughput_tps"].get<double>(), d["power_w"].get<double>()};
    ed.tdp_w = d["tdp_w"].get<double>();
    ed.batch = d["batch"].get<long long>();
    ed.tokens_per_joule = d["tokens_per_joule"].get<double>();
    result.history.evaluated.push_back(ed);
  }
  if (result.archive.entries().empty()) {
    std::cerr << "report: no feasible entries under the TDP budget\n";
    return kExitEmptyArchive;
  }

  const auto rows = memx::pareto_report(result, space, catalog, top, tdp);
  memx::write_text_file((fs::path(run_dir) / "frontier.csv").string(),
                        memx::frontier_csv(rows));
  memx::write_text_file((fs::path(run_dir) / "pareto_points.csv").string(),
                        memx::pareto_points_csv(result, tdp));
  json manifest = manifest_base("report");
  manifest["flags"] = {{"run", run_dir}, {"tdp", tdp}, {"top", top}};
  memx::write_text_file((fs::path(run_dir) / "report.manifest.json").string(),
                        manifest.dump(2) + "\n");
  std::cout << "top configurations by tokens/J under " << tdp << " W:\n";
  for (const auto& r : rows) {
    std::cout << "  " << r.design_id << " pe=" << r.pe_array
              << " onchip=" << r.onchip << " l1=" << r.l1 << " l2=" << r.l2
              << " l3=" << r.l3 << " tps=" << r.tps << " avg_w=" << r.avg_w
              << " tokens/J=" << r.tokens_per_joule << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memexplorer: heterogeneous NPU memory system co-design toolkit"};
  app.require_subcommand(1);
  std::string catalog_path;
  app.add_option("--catalog", catalog_path,
                 "catalog file (overrides MEMEXPLORER_CATALOG and the builtin)");

  auto* catalog_cmd = app.add_subcommand("catalog", "memory technology registry");
  catalog_cmd->require_subcommand(1);
  catalog_cmd->add_subcommand("list", "print the active catalog");
  auto* cat_validate = catalog_cmd->add_subcommand("validate", "check a catalog file");
  std::string cat_file;
  cat_validate->add_option("file", cat_file, "catalog JSON file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a design on a workload");
  std::string design_path, workload_path, out_path = "result.json";
  std::string stage = "prefill", decode_design_path;
  double link_gbps = 900.0;
  bool unconstrained = false;
  eval_cmd->add_option("--design", design_path)->required();
  eval_cmd->add_option("--workload", workload_path)->required();
  eval_cmd->add_option("--stage", stage, "prefill|decode|combined|breakdown");
  eval_cmd->add_option("--out", out_path);
  eval_cmd->add_option("--decode-design", decode_design_path,
                       "separate decode device for the combined stage");
  eval_cmd->add_option("--link-gbps", link_gbps, "PD KV-handoff link bandwidth");
  eval_cmd->add_flag("--unconstrained", unconstrained,
                     "skip shoreline/integration feasibility (ablation mode)");

  auto* validate_cmd =
      app.add_subcommand("validate", "compare the analytic transfer model "
                                     "against the chunked simulator");
  std::size_t cases = 50;
  std::uint64_t val_seed = 7;
  double tolerance = 0.02, chunk_mib = 1.0;
  std::string val_out;
  validate_cmd->add_option("--cases", cases);
  validate_cmd->add_option("--seed", val_seed);
  validate_cmd->add_option("--tolerance", tolerance);
  validate_cmd->add_option("--chunk-mib", chunk_mib);
  validate_cmd->add_option("--out", val_out, "write the JSON report here");

  auto* explore_cmd = app.add_subcommand("explore", "design space exploration");
  std::string space_path, ex_workload, ex_stage = "prefill", method = "ehvi";
  std::string run_dir = "run";
  std::size_t budget = 100, n_init = 20, n_seeds = 1, pool = 2048;
  std::uint64_t seed_base = 0;
  double tdp = 700.0;
  explore_cmd->add_option("--space", space_path, "space.json domain overrides");
  explore_cmd->add_option("--workload", ex_workload)->required();
  explore_cmd->add_option("--stage", ex_stage, "prefill|decode");
  explore_cmd->add_option("--method", method, "ehvi|nsga2|random|all");
  explore_cmd->add_option("--budget", budget, "total evaluations per run");
  explore_cmd->add_option("--init", n_init, "shared initialization size");
  explore_cmd->add_option("--seeds", n_seeds, "number of seeds");
  explore_cmd->add_option("--seed", seed_base, "first seed");
  explore_cmd->add_option("--tdp", tdp, "TDP budget in watts");
  explore_cmd->add_option("--pool", pool, "acquisition candidate pool size");
  explore_cmd->add_option("--out", run_dir);

  auto* report_cmd = app.add_subcommand("report", "frontier table + plot data");
  std::string report_run = "run";
  double report_tdp = 700.0;
  std::size_t top = 10;
  report_cmd->add_option("--run", report_run);
  report_cmd->add_option("--tdp", report_tdp);
  report_cmd->add_option("--top", top);

  CLI11_PARSE(app, argc, argv);

  try {
    if (catalog_cmd->parsed()) {
      if (cat_validate->parsed()) return cmd_catalog_validate(cat_file);
      return cmd_catalog_list(catalog_path);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(design_path, workload_path, stage, out_path,
                      decode_design_path, link_gbps, unconstrained,
                      catalog_path);
    }
    if (validate_cmd->parsed()) {
      return cmd_validate(cases, val_seed, tolerance, chunk_mib, val_out,
                          catalog_path);
    }
    if (explore_cmd->parsed()) {
      return cmd_explore(space_path, ex_workload, ex_stage, method, budget,
                         n_init, n_seeds, seed_base, tdp, pool, run_dir,
                         catalog_path);
    }
    if (report_cmd->parsed()) {
      return cmd_report(report_run, report_tdp, top, catalog_path);
    }
  } catch (const memx::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const memx::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const memx::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
