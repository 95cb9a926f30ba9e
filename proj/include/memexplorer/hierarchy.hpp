// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memexplorer/tech_catalog.hpp"

namespace memx {

/// One level of the memory system: `units` identical stacks/packages/layers
/// of a single technology acting as one aggregated tier.
struct TierInstance {
  MemoryTechnology tech;
  int units = 1;

  double aggregate_capacity() const { return units * tech.capacity_bytes; }
  double aggregate_peak_bandwidth() const {
    return units * tech.bandwidth_bytes_per_s;
  }
};

/// Ordered memory levels, index 0 closest to the compute unit (level 0 of the
/// transfer model is the compute unit itself; tiers[0] is model level 1).
/// On-chip tiers come first, then off-chip L1..L3.
struct HierarchySpec {
  std::vector<TierInstance> tiers;

  std::size_t levels() const { return tiers.size(); }
  double total_capacity() const;
  /// Basic shape checks (non-empty, positive units, on-chip-first ordering).
  void validate() const;  // throws ValidationError
};

/// Where a payload lives: placement[i] is the fraction of total_bytes
/// resident at tier i. Fractions sum to 1.
struct TransferRequest {
  double total_bytes = 0.0;
  std::vector<double> placement;

  void validate(std::size_t levels) const;  // throws ValidationError
};

/// Outcome of the physical-integration check. Infeasibility is a reported
/// outcome, not an error.
struct HierarchyFeasibility {
  bool feasible = true;
  double shoreline_used_mm = 0.0;
  double shoreline_limit_mm = 0.0;
  std::vector<std::string> violations;
};

/// Checks (a) per-tier unit counts against each technology's allowed set
/// (skipped when `constrained` is false), (b) the summed off-chip shoreline
/// against the budget, (c) on-chip-before-off-chip ordering and the three
/// off-chip level limit.
HierarchyFeasibility validate_hierarchy(const HierarchySpec& spec,
                                        const Catalog& catalog,
                                        const ShorelineBudget& budget,
                                        bool constrained = true);

/// Effective bandwidth per boundary i = 1..L under simultaneous
/// double-buffered flow: the deepest boundary runs at its peak and each
/// shallower tier loses the bandwidth its inbound stream consumes,
/// B_i_eff = B_i_peak - B_{i+1}_eff. Throws InfeasibleError{Bandwidth}
/// naming the first boundary whose effective bandwidth is not positive.
std::vector<double> effective_bandwidths(const HierarchySpec& spec);

/// Fixed latency plus the resident fraction's streaming time across one
/// boundary: lambda_i + alpha_i * x / B_i_eff.
double boundary_time(double total_bytes, double alpha, std::size_t boundary,
                     const HierarchySpec& spec,
                     const std::vector<double>& eff_bw);

/// Total double-buffered transfer time. At each level the payload still
/// outstanding either streams across the current boundary with the deeper
/// supply fully hidden (fully overlapped), or the deeper levels dominate and
/// their completion time is the answer (bandwidth-limited). Evaluates to the
/// nested maximum of lambda_i + x_i / B_i_eff over levels, with
/// x_i = total * (1 - sum of shallower placement fractions).
double total_transfer_time(const TransferRequest& req,
                           const HierarchySpec& spec);

/// Same, with precomputed effective bandwidths (hot path in the evaluator);
/// `bw_scale` scales every boundary's effective bandwidth, used for
/// matrix/vector bandwidth-priority splits.
double total_transfer_time(const TransferRequest& req,
                           const HierarchySpec& spec,
                           const std::vector<double>& eff_bw,
                           double bw_scale = 1.0);

}  // namespace memx
