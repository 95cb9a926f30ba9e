// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/dse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "memexplorer/errors.hpp"
#include "memexplorer/gp.hpp"
#include "memexplorer/nsga2.hpp"
#include "memexplorer/sobol.hpp"

namespace memx {

namespace {

struct Evaluation {
  ObjectiveVector objectives;
  double tdp_w = 0.0;
  long long batch = 1;
};

/// Shared evaluation cache; duplicate proposals consume budget but reuse the
/// computed objectives.
class Evaluator {
 public:
  Evaluator(const DesignSpace& space, const Catalog& catalog,
            const Workload& workload, const DseConfig& cfg)
      : space_(space), catalog_(catalog), workload_(workload), cfg_(cfg) {}

  const Evaluation& evaluate(const LatticePoint& p) {
    auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    DesignPoint design = space_.decode(p, catalog_);
    StageResult res = evaluate_stage(design, workload_, cfg_.stage);
    Evaluation ev;
    ev.objectives = {res.tps, res.power.avg_power_w};
    ev.tdp_w = res.power.tdp_w;
    ev.batch = res.batch;
    return cache_.emplace(p, ev).first->second;
  }

  bool feasible(const LatticePoint& p) {
    auto it = feasible_cache_.find(p);
    if (it != feasible_cache_.end()) return it->second;
    bool ok;
    try {
      DesignPoint design = space_.decode(p, catalog_);
      ok = design_feasible(design, catalog_, cfg_.shoreline, cfg_.tdp_budget_w,
                           workload_, cfg_.stage);
    } catch (const std::exception&) {
      ok = false;
    }
    return feasible_cache_.emplace(p, ok).first->second;
  }

 private:
  const DesignSpace& space_;
  const Catalog& catalog_;
  const Workload& workload_;
  const DseConfig& cfg_;
  std::unordered_map<LatticePoint, Evaluation, LatticePointHash> cache_;
  std::unordered_map<LatticePoint, bool, LatticePointHash> feasible_cache_;
};

struct RunState {
  DseResult result;
  std::unordered_set<LatticePoint, LatticePointHash> seen;
  std::vector<LatticePoint> points;        // evaluation order
  std::vector<ObjectiveVector> objectives;
  std::chrono::steady_clock::time_point t0;

  explicit RunState(const ObjectiveVector& reference)
      : result{DseHistory{}, ParetoArchive(reference)} {}
};

void record(RunState& st, const DesignSpace& space, const LatticePoint& p,
            const Evaluation& ev) {
  const std::string id = space.design_id(p);
  st.result.archive.insert({id, ev.objectives});
  st.points.push_back(p);
  st.objectives.push_back(ev.objectives);
  if (st.seen.insert(p).second) {
    EvaluatedDesign d;
    d.point = p;
    d.design_id = id;
    d.objectives = ev.objectives;
    d.tdp_w = ev.tdp_w;
    d.batch = ev.batch;
    d.tokens_per_joule = ev.objectives.power_w > 0.0
                             ? ev.objectives.throughput_tps / ev.objectives.power_w
                             : 0.0;
    st.result.history.evaluated.push_back(d);
  }
  DseStep step;
  step.step = st.points.size();
  step.point = p;
  step.design_id = id;
  step.objectives = ev.objectives;
  step.hv_after = st.result.archive.hypervolume();
  step.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - st.t0)
          .count();
  st.result.history.steps.push_back(step);
}

}  // namespace

std::vector<LatticePoint> sobol_init(const DesignSpace& space, std::size_t n,
                                     std::uint64_t seed, const Catalog& catalog,
                                     const Workload& workload,
                                     const DseConfig& cfg) {
  if (n < 1) throw ValidationError("sobol_init: n must be >= 1");
  Evaluator ev(space, catalog, workload, cfg);
  SobolSequence sobol(static_cast<unsigned>(space.embed_dim()), seed);
  std::vector<LatticePoint> out;
  std::unordered_set<LatticePoint, LatticePointHash> used;
  const std::size_t max_draws = 1000 * n;
  for (std::size_t draw = 0; draw < max_draws && out.size() < n; ++draw) {
    LatticePoint p = space.snap(sobol.next());
    if (used.count(p) || !ev.feasible(p)) continue;
    used.insert(p);
    out.push_back(p);
  }
  if (out.size() < n) {
    throw InfeasibleError(InfeasibleError::Kind::SearchSpace,
                          "sobol_init: only " + std::to_string(out.size()) +
                              " feasible points found in " +
                              std::to_string(max_draws) + " draws");
  }
  return out;
}

namespace {

LatticePoint sample_feasible(const DesignSpace& space, Evaluator& ev, Rng& rng,
                             std::size_t max_draws = 100000) {
  for (std::size_t i = 0; i < max_draws; ++i) {
    LatticePoint p = space.uniform_sample(rng);
    if (ev.feasible(p)) return p;
  }
  throw InfeasibleError(InfeasibleError::Kind::SearchSpace,
                        "uniform sampling found no feasible point");
}

void run_ehvi(const DesignSpace& space, Evaluator& ev, RunState& st,
              const DseConfig& cfg) {
  Rng pool_rng(cfg.seed, "pool");
  while (st.points.size() < cfg.n_total) {
    // Fit independent surrogates on all observations so far.
    const std::size_t n = st.points.size();
    Eigen::MatrixXd X(n, space.embed_dim());
    Eigen::VectorXd y_tps(n), y_pow(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto e = space.embed(st.points[i]);
      for (std::size_t j = 0; j < e.size(); ++j) X(i, j) = e[j];
      y_tps(i) = st.objectives[i].throughput_tps;
      y_pow(i) = st.objectives[i].power_w;
    }
    GaussianProcess gp_tps, gp_pow;
    gp_tps.fit(X, y_tps, cfg.seed);
    gp_pow.fit(X, y_pow, cfg.seed + 1);

    // Score a random pool of unevaluated feasible candidates.
    std::vector<LatticePoint> pool;
    std::unordered_set<LatticePoint, LatticePointHash> pool_seen;
    std::size_t draws = 0;
    const std::size_t max_draws = 200 * cfg.pool_size;
    while (pool.size() < cfg.pool_size && draws < max_draws) {
      ++draws;
      LatticePoint p = space.uniform_sample(pool_rng);
      if (st.seen.count(p) || pool_seen.count(p)) continue;
      if (!ev.feasible(p)) continue;
      pool_seen.insert(p);
      pool.push_back(p);
    }
    if (pool.empty()) return;  // space exhausted

    const LatticePoint& best =
        propose_next(gp_tps, gp_pow, space, st.result.archive, pool);
    record(st, space, best, ev.evaluate(best));
  }
}

void run_random(const DesignSpace& space, Evaluator& ev, RunState& st,
                const DseConfig& cfg) {
  Rng rng(cfg.seed, "pool");
  while (st.points.size() < cfg.n_total) {
    LatticePoint p = sample_feasible(space, ev, rng);
    record(st, space, p, ev.evaluate(p));
  }
}

void run_nsga2(const DesignSpace& space, Evaluator& ev, RunState& st,
               const DseConfig& cfg) {
  Rng rng(cfg.seed, "nsga2");
  const std::size_t pop_size = cfg.n_init;
  std::vector<LatticePoint> pop(st.points.begin(), st.points.end());
  std::vector<ObjectiveVector> pop_obj(st.objectives.begin(), st.objectives.end());

  auto tournament = [&](const std::vector<std::size_t>& rank,
                        const std::vector<double>& crowd) {
    std::size_t a = rng.uniform_index(pop.size());
    std::size_t b = rng.uniform_index(pop.size());
    if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
    return crowd[a] >= crowd[b] ? a : b;
  };

  while (st.points.size() < cfg.n_total) {
    std::vector<Point2> obj_min;
    for (const auto& o : pop_obj) obj_min.push_back(o.minimized());
    const auto ranks = dominance_ranks(obj_min);
    std::vector<double> crowd(pop.size(), 0.0);
    for (const auto& front : non_dominated_sort(obj_min)) {
      const auto cd = crowding_distance(obj_min, front);
      for (std::size_t i = 0; i < front.size(); ++i) crowd[front[i]] = cd[i];
    }

    // One generation of offspring, clipped to the remaining budget.
    const std::size_t want =
        std::min(pop_size, cfg.n_total - st.points.size());
    std::vector<LatticePoint> offspring;
    while (offspring.size() < want) {
      const LatticePoint& pa = pop[tournament(ranks, crowd)];
      const LatticePoint& pb = pop[tournament(ranks, crowd)];
      LatticePoint child = pa;
      if (rng.uniform() < 0.9) {  // uniform crossover
        for (std::size_t d = 0; d < child.idx.size(); ++d) {
          if (rng.uniform() < 0.5) child.idx[d] = pb.idx[d];
        }
      }
      const double pm = 1.0 / static_cast<double>(space.num_dims());
      for (std::size_t d = 0; d < child.idx.size(); ++d) {
        if (rng.uniform() < pm) {
          child.idx[d] = static_cast<int>(
              rng.uniform_index(space.dims()[d].values.size()));
        }
      }
      space.canonicalize(child);
      if (!ev.feasible(child)) {
        // Retry with a fresh feasible draw so the budget is never wasted on
        // designs the filter already rejects.
        child = sample_feasible(space, ev, rng);
      }
      offspring.push_back(child);
    }

    std::vector<ObjectiveVector> off_obj;
    for (const auto& c : offspring) {
      const Evaluation& e = ev.evaluate(c);
      record(st, space, c, e);
      off_obj.push_back(e.objectives);
    }

    // Environmental selection over parents + offspring.
    std::vector<LatticePoint> combined = pop;
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    std::vector<ObjectiveVector> combined_obj = pop_obj;
    combined_obj.insert(combined_obj.end(), off_obj.begin(), off_obj.end());
    std::vector<Point2> comb_min;
    for (const auto& o : combined_obj) comb_min.push_back(o.minimized());

    std::vector<LatticePoint> next_pop;
    std::vector<ObjectiveVector> next_obj;
    for (const auto& front : non_dominated_sort(comb_min)) {
      if (next_pop.size() >= pop_size) break;
      std::vector<std::size_t> members = front;
      if (next_pop.size() + members.size() > pop_size) {
        const auto cd = crowding_distance(comb_min, front);
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          if (cd[a] != cd[b]) return cd[a] > cd[b];
          return front[a] < front[b];
        });
        members.clear();
        for (std::size_t i = 0;
             i < order.size() && next_pop.size() + members.size() < pop_size; ++i) {
          members.push_back(front[order[i]]);
        }
      }
      for (std::size_t i : members) {
        next_pop.push_back(combined[i]);
        next_obj.push_back(combined_obj[i]);
      }
    }
    pop = std::move(next_pop);
    pop_obj = std::move(next_obj);
  }
}

}  // namespace

const LatticePoint& propose_next(const GaussianProcess& throughput_gp,
                                 const GaussianProcess& power_gp,
                                 const DesignSpace& space,
                                 const ParetoArchive& archive,
                                 const std::vector<LatticePoint>& pool) {
  if (pool.empty()) {
    throw ValidationError("propose_next: candidate pool is empty");
  }
  std::vector<ObjectiveVector> front;
  front.reserve(archive.entries().size());
  for (const auto& e : archive.entries()) front.push_back(e.objectives);

  double best_score = -1.0;
  std::vector<double> best_embed;
  const LatticePoint* best = nullptr;
  for (const auto& p : pool) {
    const auto emb = space.embed(p);
    Eigen::VectorXd x(emb.size());
    for (std::size_t j = 0; j < emb.size(); ++j) x(j) = emb[j];
    const auto post_t = throughput_gp.predict(x);
    const auto post_p = power_gp.predict(x);
    const double score =
        ehvi({post_t.mean, post_p.mean}, std::sqrt(post_t.variance),
             std::sqrt(post_p.variance), front, archive.reference());
    const bool better =
        score > best_score ||
        (score == best_score && best && emb < best_embed);  // lexicographic tie
    if (better) {
      best_score = score;
      best = &p;
      best_embed = emb;
    }
  }
  return *best;
}

DseResult run_dse(const DesignSpace& space, const Workload& workload,
                  const DseConfig& cfg, const Catalog& catalog) {
  if (cfg.n_total < cfg.n_init) {
    throw ValidationError("dse: budget must be >= the initialization size");
  }
  Evaluator ev(space, catalog, workload, cfg);
  RunState st(ObjectiveVector{0.0, cfg.tdp_budget_w});
  st.t0 = std::chrono::steady_clock::now();
  st.result.history.method = to_string(cfg.method);
  st.result.history.seed = cfg.seed;
  st.result.history.n_init = cfg.n_init;
  st.result.history.n_total = cfg.n_total;

  // All methods share the same seeded initialization prefix.
  const auto prefix =
      sobol_init(space, cfg.n_init, cfg.seed, catalog, workload, cfg);
  for (const auto& p : prefix) record(st, space, p, ev.evaluate(p));

  if (st.points.size() < cfg.n_total) {
    switch (cfg.method) {
      case DseMethod::Ehvi: run_ehvi(space, ev, st, cfg); break;
      case DseMethod::Random: run_random(space, ev, st, cfg); break;
      case DseMethod::Nsga2: run_nsga2(space, ev, st, cfg); break;
    }
  }
  return st.result;
}

std::vector<FrontierRow> pareto_report(const DseResult& result,
                                       const DesignSpace& space,
                                       const Catalog& catalog, std::size_t k,
                                       double tdp_budget_w) {
  std::unordered_map<std::string, const EvaluatedDesign*> by_id;
  for (const auto& d : result.history.evaluated) by_id[d.design_id] = &d;

  std::vector<FrontierRow> rows;
  for (const auto& e : result.archive.entries()) {
    auto it = by_id.find(e.design_id);
    if (it == by_id.end()) continue;
    const EvaluatedDesign& d = *it->second;
    if (d.tdp_w > tdp_budget_w) continue;
    DesignPoint dp = space.decode(d.point, catalog);

    FrontierRow row;
    row.design_id = d.design_id;
    row.pe_array = std::to_string(dp.compute.pe_rows) + "x" +
                   std::to_string(dp.compute.pe_cols);
    row.vlen = dp.compute.vlen;
    std::vector<std::string> tier_names;
    for (const auto& t : dp.hierarchy.tiers) {
      tier_names.push_back(t.tech.name + "x" + std::to_string(t.units));
    }
    std::size_t pos = 0;
    if (!dp.hierarchy.tiers.empty() &&
        dp.hierarchy.tiers[0].tech.kind == MemoryKind::OnChip) {
      row.onchip = tier_names[pos++];
    } else {
      row.onchip = "none";
    }
    row.l1 = pos < tier_names.size() ? tier_names[pos++] : "none";
    row.l2 = pos < tier_names.size() ? tier_names[pos++] : "none";
    row.l3 = pos < tier_names.size() ? tier_names[pos++] : "none";
    row.storage = to_string(dp.strategy.storage_priority);
    row.exec = to_string(dp.strategy.dataflow);
    row.bw = to_string(dp.strategy.bw_priority);
    row.avg_w = d.objectives.power_w;
    row.tdp_w = d.tdp_w;
    row.batch = d.batch;
    row.tps = d.objectives.throughput_tps;
    row.tokens_per_joule = d.tokens_per_joule;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const FrontierRow& a, const FrontierRow& b) {
    if (a.tokens_per_joule != b.tokens_per_joule) {
      return a.tokens_per_joule > b.tokens_per_joule;
    }
    return a.avg_w < b.avg_w;
  });
  if (rows.size() > k) rows.resize(k);
  return rows;
}

const char* to_string(DseMethod m) {
  switch (m) {
    case DseMethod::Ehvi: return "ehvi";
    case DseMethod::Nsga2: return "nsga2";
    case DseMethod::Random: return "random";
  }
  return "?";
}

DseMethod dse_method_from(const std::string& name) {
  if (name == "ehvi") return DseMethod::Ehvi;
  if (name == "nsga2") return DseMethod::Nsga2;
  if (name == "random") return DseMethod::Random;
  throw ValidationError("unknown DSE method '" + name + "'");
}

}  // namespace memx
