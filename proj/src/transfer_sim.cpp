// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/transfer_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memexplorer/errors.hpp"
#include "memexplorer/rng.hpp"
#include "memexplorer/units.hpp"

namespace memx {

namespace {

struct Chunk {
  double bytes = 0.0;
  double available_s = 0.0;  // when the chunk has fully arrived at this level
  int home_tier = 0;
  std::uint32_t index = 0;  // stable tiebreak
};

}  // namespace

double simulate_transfer(const OracleConfig& cfg) {
  if (!(cfg.chunk_bytes > 0.0)) {
    throw ValidationError("oracle: chunk_bytes must be positive");
  }
  const HierarchySpec& h = cfg.hierarchy;
  cfg.placement.validate(h.tiers.size());
  const std::vector<double> eff = effective_bandwidths(h);
  const std::size_t levels = h.tiers.size();

  // Resident chunks per tier, available at t = 0.
  std::vector<std::vector<Chunk>> inbox(levels);
  std::uint32_t next_index = 0;
  for (std::size_t i = 0; i < levels; ++i) {
    double bytes = cfg.placement.placement[i] * cfg.placement.total_bytes;
    while (bytes > 0.0) {
      double sz = std::min(bytes, cfg.chunk_bytes);
      inbox[i].push_back(Chunk{sz, 0.0, static_cast<int>(i), next_index++});
      bytes -= sz;
    }
  }

  // Sweep boundaries from the deepest inward; arrivals at level i-1 are the
  // chunks leaving boundary i.
  double completion = 0.0;
  for (std::size_t i = levels; i-- > 0;) {
    auto& queue = inbox[i];
    std::sort(queue.begin(), queue.end(), [](const Chunk& a, const Chunk& b) {
      if (a.available_s != b.available_s) return a.available_s < b.available_s;
      if (a.home_tier != b.home_tier) return a.home_tier < b.home_tier;
      return a.index < b.index;
    });
    // Per-request fixed latency charged once: the boundary opens at lambda_i.
    double busy_until = h.tiers[i].tech.latency_s;
    for (auto& c : queue) {
      double start = std::max(c.available_s, busy_until);
      busy_until = start + c.bytes / eff[i];
      c.available_s = busy_until;  // fully arrived one level in
      if (i == 0) {
        completion = std::max(completion, busy_until);
      } else {
        inbox[i - 1].push_back(c);
      }
    }
    if (queue.empty() && i == 0) completion = std::max(completion, 0.0);
  }
  return completion;
}

namespace {

std::string describe(const HierarchySpec& h) {
  std::ostringstream os;
  for (std::size_t i = 0; i < h.tiers.size(); ++i) {
    if (i) os << " | ";
    os << h.tiers[i].tech.name << "x" << h.tiers[i].units;
  }
  return os.str();
}

/// Draws a random hierarchy with a feasible effective-bandwidth chain.
HierarchySpec sample_hierarchy(Rng& rng, const Catalog& catalog) {
  std::vector<const MemoryTechnology*> onchip, offchip;
  for (const auto& [name, tech] : catalog) {
    (tech.kind == MemoryKind::OnChip ? onchip : offchip).push_back(&tech);
  }
  const int stack_choices[] = {1, 2, 4, 8};

  for (int attempt = 0; attempt < 1000; ++attempt) {
    HierarchySpec h;
    std::size_t depth = 1 + rng.uniform_index(4);  // 1..4 levels
    // Innermost tier: usually on-chip, sometimes a bare off-chip hierarchy.
    bool with_onchip = rng.uniform() < 0.8 && !onchip.empty();
    if (with_onchip) {
      const MemoryTechnology* t = onchip[rng.uniform_index(onchip.size())];
      int units = t->allowed_units.empty()
                      ? 1
                      : t->allowed_units[rng.uniform_index(t->allowed_units.size())];
      h.tiers.push_back(TierInstance{*t, units});
    }
    std::vector<const MemoryTechnology*> pool = offchip;
    while (h.tiers.size() < depth && !pool.empty()) {
      std::size_t pick = rng.uniform_index(pool.size());
      const MemoryTechnology* t = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      h.tiers.push_back(TierInstance{*t, stack_choices[rng.uniform_index(4)]});
    }
    if (h.tiers.empty()) continue;
    // Deeper tiers must leave headroom; order drawn tiers by aggregate
    // bandwidth so the chain has a chance, then reject if it still fails.
    std::stable_sort(h.tiers.begin(), h.tiers.end(),
                     [](const TierInstance& a, const TierInstance& b) {
                       bool a_on = a.tech.kind == MemoryKind::OnChip;
                       bool b_on = b.tech.kind == MemoryKind::OnChip;
                       if (a_on != b_on) return a_on;
                       return a.aggregate_peak_bandwidth() >
                              b.aggregate_peak_bandwidth();
                     });
    try {
      effective_bandwidths(h);
      return h;
    } catch (const InfeasibleError&) {
      continue;
    }
  }
  throw InfeasibleError(InfeasibleError::Kind::SearchSpace,
                        "oracle sampler: no bandwidth-feasible hierarchy found");
}

}  // namespace

OracleReport validate_against_analytic(std::size_t n_cases, std::uint64_t seed,
                                       double tolerance, const Catalog& catalog,
                                       double chunk_bytes) {
  if (n_cases < 1) throw ValidationError("oracle: n_cases must be >= 1");
  Rng rng(seed, "oracle");
  OracleReport report;
  double err_sum = 0.0;
  for (std::size_t k = 0; k < n_cases; ++k) {
    OracleConfig cfg;
    cfg.chunk_bytes = chunk_bytes;
    cfg.hierarchy = sample_hierarchy(rng, catalog);
    cfg.placement.total_bytes = rng.uniform(1.0 * units::kMega, 10.0 * units::kGiga);
    cfg.placement.placement = rng.simplex(cfg.hierarchy.tiers.size());

    double analytic = total_transfer_time(cfg.placement, cfg.hierarchy);
    double simulated = simulate_transfer(cfg);
    double rel = std::abs(simulated - analytic) / std::max(analytic, 1e-300);

    OracleCase c;
    c.index = k;
    c.payload_bytes = cfg.placement.total_bytes;
    c.analytic_s = analytic;
    c.simulated_s = simulated;
    c.rel_err = rel;
    c.hierarchy_desc = describe(cfg.hierarchy);
    report.cases.push_back(c);
    if (rel > tolerance) report.failures.push_back(c);
    report.max_rel_err = std::max(report.max_rel_err, rel);
    err_sum += rel;
  }
  report.mean_rel_err = err_sum / static_cast<double>(n_cases);
  return report;
}

}  // namespace memx
