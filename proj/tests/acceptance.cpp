// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Criteria 8/9 run the full exploration protocol (budget 100, shared 20-point
// initialization, 10 seeds) and dominate the runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memexplorer/dse.hpp"
#include "memexplorer/errors.hpp"
#include "memexplorer/evaluator.hpp"
#include "memexplorer/io_json.hpp"
#include "memexplorer/pareto.hpp"
#include "memexplorer/rng.hpp"
#include "memexplorer/tech_catalog.hpp"
#include "memexplorer/transfer_sim.hpp"
#include "memexplorer/units.hpp"

using namespace memx;

namespace {

Workload osworld_l() {
  Workload w;
  w.model.name = "llama-3.3-70b";
  w.model.num_layers = 80;
  w.model.hidden_dim = 8192;
  w.model.num_heads = 64;
  w.model.num_kv_heads = 8;
  w.model.head_dim = 128;
  w.model.ffn_dim = 28672;
  w.model.vocab_size = 128256;
  w.trace = {90000, 8000, Stage::Prefill};
  w.precision = {8, 8, 8};
  return w;
}

Workload qwen32_bfcl() {
  Workload w;
  w.model.name = "qwen3-32b";
  w.model.num_layers = 64;
  w.model.hidden_dim = 5120;
  w.model.num_heads = 64;
  w.model.num_kv_heads = 8;
  w.model.head_dim = 128;
  w.model.ffn_dim = 25600;
  w.model.vocab_size = 151936;
  w.trace = {114000, 5000, Stage::Prefill};
  w.precision = {16, 16, 16};
  return w;
}

// ---------------------------------------------------------------- criterion 1
bool power_exactness(std::string& detail) {
  const Catalog& cat = default_catalog();
  const auto hbm = MemoryPowerCoefficients::from(cat.at("HBM3E"));
  const double hbm_peak = memory_tier_power(24e9, 1e12, 0.0, hbm, 1e12);
  const auto lp = MemoryPowerCoefficients::from(cat.at("LPDDR5X"));
  const double lp_idle = memory_tier_power(16e9, 0.0, 0.0, lp, 76.8e9);
  const double err1 = std::abs(hbm_peak - 25.8) / 25.8;
  const double err2 = std::abs(lp_idle - 0.1224) / 0.1224;
  std::ostringstream os;
  os << "HBM3E@peak-read=" << hbm_peak << " W (rel err " << err1
     << "), LPDDR5X idle=" << lp_idle << " W (rel err " << err2 << ")";
  detail = os.str();
  return err1 <= 1e-9 && err2 <= 1e-9;
}

// ---------------------------------------------------------------- criterion 2
bool shoreline_constraint(std::string& detail) {
  const Catalog& cat = default_catalog();
  Rng rng(2024, "acceptance-shoreline");
  std::size_t checks = 0;
  for (const auto& [name, tech] : cat) {
    if (tech.kind != MemoryKind::OffChip) continue;
    for (int i = 0; i < 20; ++i) {
      ShorelineBudget budget{rng.uniform(1.0, 66.0), rng.uniform(0.0, 3.0)};
      const int expect = static_cast<int>(
          std::floor(budget.l_mem_mm / (*tech.shoreline_mm + budget.l_margin_mm)));
      if (max_stacks(tech, budget) != expect) {
        detail = "floor formula mismatch for " + name;
        return false;
      }
      ++checks;
    }
  }
  // every hierarchy whose summed shoreline exceeds the edge is rejected
  for (int i = 0; i < 100; ++i) {
    HierarchySpec h;
    h.tiers.push_back(TierInstance{cat.at("SRAM2D"), 1});
    double used = 0.0;
    ShorelineBudget budget;
    std::vector<const char*> names = {"HBM3E", "HBM4", "HBF", "LPDDR5X"};
    for (const char* n : names) {
      int stacks = 1 << rng.uniform_index(4);
      h.tiers.push_back(TierInstance{cat.at(n), stacks});
      used += stacks * (*cat.at(n).shoreline_mm + budget.l_margin_mm);
    }
    const auto rep = validate_hierarchy(h, cat, budget, false);
    if ((used > budget.l_mem_mm) && rep.feasible) {
      detail = "over-shoreline hierarchy accepted";
      return false;
    }
    if (rep.shoreline_used_mm != used) {
      detail = "shoreline accounting mismatch";
      return false;
    }
  }
  detail = std::to_string(checks) + " stack-count checks + 100 random hierarchies";
  return true;
}

// ---------------------------------------------------------------- criterion 3
bool oracle_equivalence(std::string& detail) {
  const OracleReport rep =
      validate_against_analytic(50, 7, 0.02, default_catalog());
  std::ostringstream os;
  os << "50 cases seed 7: max rel err " << rep.max_rel_err << ", mean "
     << rep.mean_rel_err << ", failures " << rep.failures.size();
  detail = os.str();
  return rep.failures.empty() && rep.max_rel_err <= 0.02;
}

// ---------------------------------------------------------------- criterion 4
bool precision_scaling(std::string& detail) {
  Workload w = qwen32_bfcl();
  Footprints f16 = tensor_footprints(w.model, {16, 16, 16}, w.trace, 1);
  Footprints f8 = tensor_footprints(w.model, {8, 8, 8}, w.trace, 1);
  const double ratio = f16.total_bytes / f8.total_bytes;
  const double abs_err = std::abs(f16.total_bytes - 174.4e9) / 174.4e9;
  std::ostringstream os;
  os << "16-bit total " << f16.total_bytes / 1e9 << " GB (vs 174.4 GB, rel "
     << abs_err << "), halving ratio " << ratio
     << "; activation model is a working-set approximation";
  detail = os.str();
  return std::abs(ratio - 2.0) <= 1e-12 && abs_err < 0.05;
}

// ---------------------------------------------------------------- criterion 5
bool decode_monotonicity(std::string& detail) {
  const Catalog& cat = default_catalog();
  DesignSpace space = DesignSpace::standard();
  Workload w = osworld_l();
  w.trace.stage = Stage::Decode;
  Rng rng(777, "acceptance-decode");
  int batch_checks = 0, tps_checks = 0;
  // 200 draws cover the batch-formula check; keep sampling beyond them until
  // the (rarer) weight-reuse-bound TPS regime has been exercised as well.
  for (int i = 0; i < 40000 && (i < 200 || tps_checks < 25); ++i) {
    LatticePoint p = space.uniform_sample(rng);
    DesignPoint base = space.decode(p, cat);
    if (base.hierarchy.tiers.empty()) continue;

    // grow capacity: add an HBF stack if absent, else an LPDDR package tier
    DesignPoint grown = base;
    bool has_hbf = false;
    for (const auto& t : grown.hierarchy.tiers) has_hbf |= t.tech.name == "HBF";
    if (!has_hbf) {
      grown.hierarchy.tiers.push_back(TierInstance{cat.at("HBF"), 1});
    } else {
      grown.hierarchy.tiers.push_back(TierInstance{cat.at("LPDDR5X"), 8});
    }
    // keep deeper tiers slower than the tier above (placement order)
    std::stable_sort(grown.hierarchy.tiers.begin(), grown.hierarchy.tiers.end(),
                     [](const TierInstance& a, const TierInstance& b) {
                       const bool a_on = a.tech.kind == MemoryKind::OnChip;
                       const bool b_on = b.tech.kind == MemoryKind::OnChip;
                       if (a_on != b_on) return a_on;
                       return a.aggregate_peak_bandwidth() >
                              b.aggregate_peak_bandwidth();
                     });

    long long b0;
    try {
      b0 = decode_max_batch(w.model, base.precision, w.trace, base.hierarchy);
    } catch (const InfeasibleError&) {
      b0 = 0;  // weights do not fit: any capacity growth can only help
    }
    long long b1;
    try {
      b1 = decode_max_batch(w.model, base.precision, w.trace, grown.hierarchy);
    } catch (const InfeasibleError&) {
      b1 = 0;
    }
    if (b1 < b0) {
      detail = "capacity growth reduced the decode batch";
      return false;
    }
    if (batch_checks < 200) ++batch_checks;

    // TPS under a weight-reuse-bound regime: fixed design, batch as the only
    // variable. Weight-reuse-bound = the weight-heavy FFN sub-op is
    // transfer-limited and the weight stream dominates, with batch-invariant
    // weight traffic (same tile pass count and weight placement at both batch
    // sizes); that is the regime where batching amortizes weight reads.
    if (b0 >= 2) {
      try {
        StageResult half = eval_decode(base, w, std::max<long long>(1, b0 / 2));
        StageResult full = eval_decode(base, w);
        bool transfer_bound = false;
        for (const auto& l : full.per_layer) {
          if (l.kind == "ffn") transfer_bound = l.memory_bound;
        }
        TrafficPlan plan_half =
            stage_traffic(w.model, base.precision, w.trace, base.strategy,
                          base.hierarchy, half.batch, Stage::Decode);
        TrafficPlan plan_full =
            stage_traffic(w.model, base.precision, w.trace, base.strategy,
                          base.hierarchy, full.batch, Stage::Decode);
        // Per-stream service times at the full batch: the weight stream must
        // dominate for batching to amortize it.
        const auto eff = effective_bandwidths(base.hierarchy);
        double weight_time = 0.0, other_time = 0.0;
        for (const auto& r : plan_full.layer_requests) {
          const double share = r.matrix_stream ? plan_full.matrix_share
                                               : plan_full.vector_share;
          const double t =
              total_transfer_time(r.request, base.hierarchy, eff, share);
          (r.operand == StreamRequest::Operand::Weights ? weight_time
                                                        : other_time) += t;
        }
        const bool weight_reuse_bound =
            transfer_bound && weight_time >= other_time &&
            plan_half.passes_attention == plan_full.passes_attention &&
            plan_half.passes_ffn == plan_full.passes_ffn &&
            plan_half.alpha_weights == plan_full.alpha_weights;
        if (weight_reuse_bound && full.batch > half.batch &&
            full.tps < half.tps * (1 - 1e-9)) {
          detail = "batch growth lowered throughput in a weight-bound regime";
          return false;
        }
        if (weight_reuse_bound) ++tps_checks;
      } catch (const InfeasibleError&) {
        // capacity slack too small for the probe batch; skip the TPS check
      }
    }
  }
  detail = std::to_string(batch_checks) + " batch checks, " +
           std::to_string(tps_checks) + " throughput checks";
  return batch_checks >= 150 && tps_checks >= 10;
}

// ---------------------------------------------------------------- criterion 6
bool ehvi_against_mc(std::string& detail) {
  Rng rng(606, "acceptance-ehvi");
  double worst = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    const int n = 1 + static_cast<int>(rng.uniform_index(10));
    std::vector<Point2> front;
    for (int i = 0; i < n; ++i) {
      front.push_back({-rng.uniform(50.0, 500.0), rng.uniform(50.0, 650.0)});
    }
    const Point2 r = {0.0, 700.0};
    const Point2 mean = {-rng.uniform(100.0, 700.0), rng.uniform(30.0, 500.0)};
    const Point2 sd = {rng.uniform(5.0, 60.0), rng.uniform(5.0, 60.0)};
    const double analytic = ehvi_min2d(mean, sd, front, r);
    const double scale = hypervolume_min2d(front, r);
    if (analytic < 0.02 * scale) continue;  // keep MC-resolvable improvers

    Rng mc(9000 + pairs, "acceptance-ehvi-mc");
    const double base = hypervolume_min2d(front, r);
    double acc = 0.0;
    const int kSamples = 100000;
    for (int s = 0; s < kSamples; s += 2) {
      const double g1 = mc.normal(), g2 = mc.normal();
      for (double sign : {1.0, -1.0}) {  // antithetic pairs
        std::vector<Point2> with = front;
        with.push_back({mean[0] + sign * sd[0] * g1, mean[1] + sign * sd[1] * g2});
        acc += hypervolume_min2d(std::move(with), r) - base;
      }
    }
    const double mc_est = acc / kSamples;
    worst = std::max(worst, std::abs(analytic - mc_est) / analytic);
    ++pairs;
  }

  // deterministic dominated candidates score exactly zero
  std::vector<Point2> front = {{-400.0, 100.0}, {-200.0, 60.0}};
  const double zero = ehvi_min2d({-100.0, 200.0}, {0.0, 0.0}, front, {0.0, 700.0});
  std::ostringstream os;
  os << "100 pairs, worst rel err " << worst << ", dominated deterministic EHVI "
     << zero;
  detail = os.str();
  return worst < 0.01 && zero == 0.0;
}

// ---------------------------------------------------------------- criterion 7
bool hypervolume_against_grid(std::string& detail) {
  Rng rng(707, "acceptance-hv");
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_index(20));
    std::vector<Point2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    const Point2 r = {1.5, 1.5};
    const double exact = hypervolume_min2d(pts, r);

    // independent grid integration at 1e-3 resolution
    double x_lo = 0.0;
    const double res = 1e-3;
    double grid = 0.0;
    for (double x = x_lo + res / 2; x < r[0]; x += res) {
      double best = r[1];
      bool covered = false;
      for (const auto& p : pts) {
        if (p[0] <= x && p[1] < best) {
          covered = true;
          best = p[1];
        }
      }
      if (covered) grid += res * (r[1] - best);
    }
    worst = std::max(worst, std::abs(exact - grid) / exact);
  }

  // monotone under insertion
  std::vector<Point2> pts;
  double prev = 0.0;
  bool monotone = true;
  for (int i = 0; i < 200; ++i) {
    pts.push_back({rng.uniform(), rng.uniform()});
    const double hv = hypervolume_min2d(pts, {1.5, 1.5});
    monotone &= hv >= prev - 1e-15;
    prev = hv;
  }
  std::ostringstream os;
  os << "50 fronts, worst grid deviation " << worst << ", insertion monotone "
     << (monotone ? "yes" : "no");
  detail = os.str();
  return worst < 1e-3 && monotone;
}

// ------------------------------------------------------------ criteria 8 + 9
struct DseCampaign {
  std::vector<double> final_hv_ehvi, final_hv_nsga2, final_hv_random;
  std::vector<FrontierRow> prefill_frontier;
  std::vector<FrontierRow> decode_frontier;
};

DseCampaign run_campaign(std::size_t budget, std::size_t n_seeds,
                         std::size_t pool) {
  const Catalog& cat = default_catalog();
  // Campaign protocol mirrors the reference experiments: quantization pinned
  // to 8/8/8 before the search, 700 W TDP budget, OSWorld-L trace.
  DesignSpace space = DesignSpace::standard();
  space.restrict_dim("weight_bits", {"8"});
  space.restrict_dim("activation_bits", {"8"});
  space.restrict_dim("kv_bits", {"8"});
  DseCampaign out;

  auto one = [&](DseMethod method, std::uint64_t seed, Stage stage) {
    Workload w = osworld_l();
    w.trace.stage = stage;
    DseConfig cfg;
    cfg.method = method;
    cfg.n_init = 20;
    cfg.n_total = budget;
    cfg.seed = seed;
    cfg.tdp_budget_w = 700.0;
    cfg.pool_size = pool;
    cfg.stage = stage;
    return run_dse(space, w, cfg, cat);
  };

  auto run_method = [&](DseMethod method, Stage stage,
                        std::vector<double>* hv_out,
                        ParetoArchive* merged,
                        std::vector<EvaluatedDesign>* designs) {
    std::vector<std::future<DseResult>> futs;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      futs.push_back(std::async(std::launch::async, one, method, s, stage));
    }
    for (auto& f : futs) {
      DseResult r = f.get();
      if (hv_out) hv_out->push_back(r.history.steps.back().hv_after);
      if (merged) {
        for (const auto& e : r.archive.entries()) merged->insert(e);
      }
      if (designs) {
        for (const auto& d : r.history.evaluated) designs->push_back(d);
      }
    }
  };

  ParetoArchive prefill_merged(ObjectiveVector{0.0, 700.0});
  std::vector<EvaluatedDesign> prefill_designs;
  run_method(DseMethod::Ehvi, Stage::Prefill, &out.final_hv_ehvi,
             &prefill_merged, &prefill_designs);
  run_method(DseMethod::Nsga2, Stage::Prefill, &out.final_hv_nsga2, nullptr,
             nullptr);
  run_method(DseMethod::Random, Stage::Prefill, &out.final_hv_random, nullptr,
             nullptr);

  DseResult prefill_res{DseHistory{}, prefill_merged};
  prefill_res.history.evaluated = prefill_designs;
  out.prefill_frontier =
      pareto_report(prefill_res, space, cat, 10, 700.0);

  ParetoArchive decode_merged(ObjectiveVector{0.0, 700.0});
  std::vector<EvaluatedDesign> decode_designs;
  run_method(DseMethod::Ehvi, Stage::Decode, nullptr, &decode_merged,
             &decode_designs);
  DseResult decode_res{DseHistory{}, decode_merged};
  decode_res.history.evaluated = decode_designs;
  out.decode_frontier = pareto_report(decode_res, space, cat, 10, 700.0);
  return out;
}

std::optional<DseCampaign> g_campaign;

const DseCampaign& campaign(std::size_t budget, std::size_t seeds,
                            std::size_t pool) {
  if (!g_campaign) g_campaign = run_campaign(budget, seeds, pool);
  return *g_campaign;
}

bool dse_dominance(std::string& detail, std::size_t budget, std::size_t seeds,
                   std::size_t pool) {
  const DseCampaign& c = campaign(budget, seeds, pool);
  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
  };
  const double m_ehvi = mean(c.final_hv_ehvi);
  const double m_nsga = mean(c.final_hv_nsga2);
  const double m_rand = mean(c.final_hv_random);
  const double n = static_cast<double>(c.final_hv_ehvi.size());
  const double pooled_se =
      std::sqrt((var(c.final_hv_ehvi) + var(c.final_hv_random)) / n);
  std::ostringstream os;
  os << "mean final HV: ehvi " << m_ehvi << ", nsga2 " << m_nsga << ", random "
     << m_rand << ", pooled SE(ehvi,random) " << pooled_se;
  detail = os.str();
  return m_ehvi >= m_nsga && m_ehvi >= m_rand && (m_ehvi - m_rand) > pooled_se;
}

bool frontier_structure(std::string& detail, std::size_t budget,
                        std::size_t seeds, std::size_t pool) {
  const DseCampaign& c = campaign(budget, seeds, pool);
  if (c.prefill_frontier.empty() || c.decode_frontier.empty()) {
    detail = "empty frontier";
    return false;
  }
  const FrontierRow& p = c.prefill_frontier.front();
  const FrontierRow& d = c.decode_frontier.front();
  const bool prefill_3d = p.onchip.find("SRAM3D") != std::string::npos;
  const bool decode_capacity = [&] {
    for (const std::string* s : {&d.l1, &d.l2, &d.l3}) {
      if (s->find("HBF") != std::string::npos ||
          s->find("LPDDR") != std::string::npos) {
        return true;
      }
    }
    return false;
  }();
  std::ostringstream os;
  os << "prefill best: onchip=" << p.onchip << " l1=" << p.l1 << " l2=" << p.l2
     << " tokens/J=" << p.tokens_per_joule << "; decode best: onchip=" << d.onchip
     << " l1=" << d.l1 << " l2=" << d.l2 << " l3=" << d.l3
     << " tokens/J=" << d.tokens_per_joule;
  detail = os.str();
  return prefill_3d && decode_capacity;
}

// --------------------------------------------------------------- criterion 10
bool determinism(std::string& detail) {
  const Catalog& cat = default_catalog();
  DesignSpace space = DesignSpace::standard();
  Workload w = osworld_l();
  DseConfig cfg;
  cfg.method = DseMethod::Ehvi;
  cfg.n_init = 10;
  cfg.n_total = 25;
  cfg.seed = 4;
  cfg.tdp_budget_w = 700.0;
  cfg.pool_size = 256;
  cfg.stage = Stage::Prefill;

  const std::string csv1 = history_csv(run_dse(space, w, cfg, cat).history);
  const std::string csv2 = history_csv(run_dse(space, w, cfg, cat).history);
  detail = csv1 == csv2 ? "identical history CSVs (" +
                              std::to_string(csv1.size()) + " bytes)"
                        : "history CSVs differ";
  return csv1 == csv2;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::size_t budget = 100, seeds = 10, pool = 2048;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--budget") == 0 && i + 1 < argc) budget = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--seeds") == 0 && i + 1 < argc) seeds = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--pool") == 0 && i + 1 < argc) pool = std::atoi(argv[++i]);
  }

  using CriterionFn = std::function<bool(std::string&)>;
  std::vector<std::pair<std::string, CriterionFn>> criteria = {
      {"power-equation exactness", power_exactness},
      {"shoreline constraint", shoreline_constraint},
      {"transfer-model oracle equivalence", oracle_equivalence},
      {"precision scaling", precision_scaling},
      {"decode capacity monotonicity", decode_monotonicity},
      {"EHVI analytic vs Monte-Carlo", ehvi_against_mc},
      {"hypervolume vs grid integration", hypervolume_against_grid},
      {"DSE dominance (HV ordering)",
       [&](std::string& d) { return dse_dominance(d, budget, seeds, pool); }},
      {"qualitative frontier structure",
       [&](std::string& d) { return frontier_structure(d, budget, seeds, pool); }},
      {"exploration determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": "
              << criteria[i].first << " [" << dt << " s] — " << detail << "\n";
    if (!ok) ++failures;
  }
  return failures;
}
