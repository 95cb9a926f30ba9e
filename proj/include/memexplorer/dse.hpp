// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memexplorer/design_space.hpp"
#include "memexplorer/gp.hpp"
#include "memexplorer/pareto.hpp"

namespace memx {

enum class DseMethod { Ehvi, Nsga2, Random };

struct DseConfig {
  DseMethod method = DseMethod::Ehvi;
  std::size_t n_init = 20;
  std::size_t n_total = 100;
  std::uint64_t seed = 0;
  double tdp_budget_w = 700.0;
  std::size_t pool_size = 2048;
  Stage stage = Stage::Prefill;
  ShorelineBudget shoreline;
};

struct DseStep {
  std::size_t step = 0;  // 1-based evaluation count
  LatticePoint point;
  std::string design_id;
  ObjectiveVector objectives;
  double hv_after = 0.0;
  double wall_time_s = 0.0;
};

struct EvaluatedDesign {
  LatticePoint point;
  std::string design_id;
  ObjectiveVector objectives;
  double tdp_w = 0.0;
  long long batch = 1;
  double tokens_per_joule = 0.0;
};

struct DseHistory {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t n_init = 0;
  std::size_t n_total = 0;
  std::vector<DseStep> steps;  // hv_after is non-decreasing
  std::vector<EvaluatedDesign> evaluated;
};

struct DseResult {
  DseHistory history;
  ParetoArchive archive;
};

/// Sobol-initialized feasible points: generates the scrambled sequence,
/// snaps to the lattice, and filters infeasible points until `n` distinct
/// feasible designs are collected (error after 1000*n draws).
std::vector<LatticePoint> sobol_init(const DesignSpace& space, std::size_t n,
                                     std::uint64_t seed, const Catalog& catalog,
                                     const Workload& workload,
                                     const DseConfig& cfg);

/// Picks the candidate with the highest expected hypervolume improvement
/// against the archive, scoring de-standardized GP posteriors; exact ties
/// break toward the lowest encoded lexicographic order. The pool must be
/// non-empty.
const LatticePoint& propose_next(const GaussianProcess& throughput_gp,
                                 const GaussianProcess& power_gp,
                                 const DesignSpace& space,
                                 const ParetoArchive& archive,
                                 const std::vector<LatticePoint>& pool);

/// Runs one exploration: every method consumes the identical Sobol prefix for
/// the seed, then EHVI / NSGA-II / uniform random sampling up to the budget.
/// Duplicate proposals consume budget and reuse cached objectives. History
/// records the archive hypervolume after every evaluation against the fixed
/// reference (0 tokens/s, TDP budget).
DseResult run_dse(const DesignSpace& space, const Workload& workload,
                  const DseConfig& cfg, const Catalog& catalog);

struct FrontierRow {
  std::string design_id;
  std::string pe_array;
  int vlen = 0;
  std::string onchip;
  std::string l1, l2, l3;
  std::string storage, exec, bw;
  double avg_w = 0.0;
  double tdp_w = 0.0;
  long long batch = 1;
  double tps = 0.0;
  double tokens_per_joule = 0.0;
};

/// Top-k archive rows by tokens/J subject to tdp <= budget, ties broken by
/// lower power.
std::vector<FrontierRow> pareto_report(const DseResult& result,
                                       const DesignSpace& space,
                                       const Catalog& catalog, std::size_t k,
                                       double tdp_budget_w);

const char* to_string(DseMethod m);
DseMethod dse_method_from(const std::string& name);

}  // namespace memx
