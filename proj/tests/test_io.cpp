// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <json.hpp>

#include "memexplorer/errors.hpp"
#include "memexplorer/io_json.hpp"
#include "memexplorer/tech_catalog.hpp"

using namespace memx;
using nlohmann::json;

namespace {

json p1_design_doc() {
  return json::parse(R"({
    "id": "p1",
    "compute": {"pe_rows": 2048, "pe_cols": 256, "vlen": 2048},
    "hierarchy": [
      {"tech": "SRAM3D", "units": 3},
      {"tech": "HBM4", "units": 2},
      {"tech": "HBF", "units": 1}
    ],
    "precision": {"weight_bits": 8, "activation_bits": 8, "kv_bits": 8},
    "strategy": {"dataflow": "WS", "storage_priority": "Activation",
                 "bw_priority": "Matrix"}
  })");
}

json osworld_doc() {
  return json::parse(R"({
    "model": {"name": "llama-3.3-70b", "num_layers": 80, "hidden_dim": 8192,
              "num_heads": 64, "num_kv_heads": 8, "head_dim": 128,
              "ffn_dim": 28672, "vocab_size": 128256},
    "trace": {"prompt_tokens": 90000, "generated_tokens": 8000,
              "stage": "prefill"},
    "precision": {"weight_bits": 8, "activation_bits": 8, "kv_bits": 8}
  })");
}

}  // namespace

TEST_CASE("design and workload parse round trip") {
  const Catalog& cat = default_catalog();
  DesignPoint d = design_from_json(p1_design_doc(), cat);
  CHECK(d.compute.pe_rows == 2048);
  CHECK(d.hierarchy.tiers.size() == 3);
  CHECK(d.strategy.dataflow == Dataflow::WS);
  json round = design_to_json(d);
  DesignPoint d2 = design_from_json(round, cat);
  CHECK(d2.compute.pe_cols == d.compute.pe_cols);
  CHECK(d2.hierarchy.tiers[1].units == 2);

  Workload w = workload_from_json(osworld_doc());
  CHECK(w.model.num_layers == 80);
  CHECK(w.trace.prompt_tokens == 90000);
  CHECK(w.precision.kv_bits == 8);
}

TEST_CASE("parse errors name the failing field") {
  const Catalog& cat = default_catalog();
  json bad = p1_design_doc();
  bad.erase("compute");
  try {
    design_from_json(bad, cat);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("compute") != std::string::npos);
  }

  json unknown_tech = p1_design_doc();
  unknown_tech["hierarchy"][0]["tech"] = "NOPE";
  CHECK_THROWS_AS(design_from_json(unknown_tech, cat), ValidationError);
}

TEST_CASE("csv formatting is locale-independent and stable") {
  CHECK(csv_double(1.0) == "1.0");
  CHECK(csv_double(0.5) == "0.5");
  CHECK(csv_double(1234.0) == "1234.0");
  CHECK(csv_double(0.1234567890123) == "0.1234567890123");

  DseHistory h;
  h.method = "ehvi";
  DseStep s;
  s.step = 1;
  s.design_id = "d-0-1";
  s.objectives = {12.5, 300.25};
  s.hv_after = 3.75;
  h.steps.push_back(s);
  CHECK(history_csv(h) ==
        "step,hv,throughput_tps,power_w,design_id\n"
        "1,3.75,12.5,300.25,d-0-1\n");
}

TEST_CASE("golden column order for run artifacts") {
  // These headers are part of the documented file format; changing them
  // breaks downstream plotting.
  CHECK(history_csv(DseHistory{}) ==
        "step,hv,throughput_tps,power_w,design_id\n");
  CHECK(frontier_csv({}) ==
        "design_id,pe_array,vlen,onchip,l1,l2,l3,storage,exec,bw,avg_w,tdp_w,"
        "batch,tps,tokens_per_joule\n");
  DseResult empty{DseHistory{}, ParetoArchive(ObjectiveVector{0.0, 700.0})};
  CHECK(pareto_points_csv(empty, 700.0) ==
        "design_id,throughput_tps,power_w,tokens_per_j,feasible\n");
  CHECK(hv_summary_csv({}) == "method,step,hv_mean,hv_std,seeds\n");
}

TEST_CASE("space overrides restrict dimensions") {
  DesignSpace space = space_from_json(json::parse(
      R"({"vlen": ["1024", "2048"], "dataflow": ["WS"]})"));
  bool vlen_seen = false, df_seen = false;
  for (const auto& d : space.dims()) {
    if (d.name == "vlen") {
      CHECK(d.values.size() == 2);
      vlen_seen = true;
    }
    if (d.name == "dataflow") {
      CHECK(d.values.size() == 1);
      df_seen = true;
    }
  }
  CHECK(vlen_seen);
  CHECK(df_seen);
  CHECK_THROWS_AS(space_from_json(json::parse(R"({"vlen": ["7"]})")),
                  ValidationError);
}

TEST_CASE("content hash is stable") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
  CHECK(content_hash("").size() == 16);
}
