// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/hierarchy.hpp"

#include <cmath>
#include <sstream>

#include "memexplorer/errors.hpp"

namespace memx {

double HierarchySpec::total_capacity() const {
  double c = 0.0;
  for (const auto& t : tiers) c += t.aggregate_capacity();
  return c;
}

void HierarchySpec::validate() const {
  if (tiers.empty()) throw ValidationError("hierarchy: at least one tier required");
  bool seen_offchip = false;
  for (const auto& t : tiers) {
    if (t.units < 1) {
      throw ValidationError("hierarchy: tier '" + t.tech.name +
                            "' must have at least one unit");
    }
    if (t.tech.kind == MemoryKind::OffChip) {
      seen_offchip = true;
    } else if (seen_offchip) {
      throw ValidationError(
          "hierarchy: on-chip tier '" + t.tech.name +
          "' appears after an off-chip tier; on-chip tiers come first");
    }
  }
}

void TransferRequest::validate(std::size_t levels) const {
  if (placement.size() != levels) {
    throw ValidationError("transfer request: placement has " +
                          std::to_string(placement.size()) +
                          " entries for a hierarchy of " +
                          std::to_string(levels) + " levels");
  }
  if (total_bytes < 0.0) {
    throw ValidationError("transfer request: negative payload");
  }
  double sum = 0.0;
  for (double a : placement) {
    if (a < -1e-12 || a > 1.0 + 1e-12) {
      throw ValidationError("transfer request: placement fraction out of [0,1]");
    }
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("transfer request: placement fractions sum to " +
                          std::to_string(sum) + ", expected 1");
  }
}

HierarchyFeasibility validate_hierarchy(const HierarchySpec& spec,
                                        const Catalog& catalog,
                                        const ShorelineBudget& budget,
                                        bool constrained) {
  budget.validate();
  HierarchyFeasibility report;
  report.shoreline_limit_mm = budget.l_mem_mm;

  bool seen_offchip = false;
  int offchip_tiers = 0;
  for (std::size_t i = 0; i < spec.tiers.size(); ++i) {
    const auto& tier = spec.tiers[i];
    auto it = catalog.find(tier.tech.name);
    if (it == catalog.end()) {
      report.feasible = false;
      report.violations.push_back("tier " + std::to_string(i + 1) +
                                  ": unknown technology '" + tier.tech.name + "'");
      continue;
    }
    const MemoryTechnology& tech = it->second;

    if (constrained && !tech.allows_units(tier.units)) {
      report.feasible = false;
      report.violations.push_back(
          "tier " + std::to_string(i + 1) + " (" + tech.name + "): unit count " +
          std::to_string(tier.units) + " outside the allowed set");
    }
    if (tier.units < 1) {
      report.feasible = false;
      report.violations.push_back("tier " + std::to_string(i + 1) + " (" +
                                  tech.name + "): unit count must be >= 1");
    }

    if (tech.kind == MemoryKind::OffChip) {
      seen_offchip = true;
      ++offchip_tiers;
      report.shoreline_used_mm +=
          tier.units * (*tech.shoreline_mm + budget.l_margin_mm);
    } else if (seen_offchip) {
      report.feasible = false;
      report.violations.push_back("tier " + std::to_string(i + 1) + " (" +
                                  tech.name +
                                  "): on-chip tier placed after off-chip tiers");
    }
  }

  if (spec.tiers.empty()) {
    report.feasible = false;
    report.violations.push_back("hierarchy has no tiers");
  }
  if (offchip_tiers > 3) {
    report.feasible = false;
    report.violations.push_back("hierarchy has " + std::to_string(offchip_tiers) +
                                " off-chip tiers; at most 3 (L1..L3) supported");
  }
  if (report.shoreline_used_mm > report.shoreline_limit_mm + 1e-12) {
    report.feasible = false;
    std::ostringstream os;
    os << "summed off-chip shoreline " << report.shoreline_used_mm
       << " mm exceeds the " << report.shoreline_limit_mm << " mm die-edge budget";
    report.violations.push_back(os.str());
  }
  return report;
}

std::vector<double> effective_bandwidths(const HierarchySpec& spec) {
  spec.validate();
  const std::size_t n = spec.tiers.size();
  std::vector<double> eff(n, 0.0);
  // Seed at the deepest boundary and subtract inward.
  eff[n - 1] = spec.tiers[n - 1].aggregate_peak_bandwidth();
  for (std::size_t i = n - 1; i-- > 0;) {
    eff[i] = spec.tiers[i].aggregate_peak_bandwidth() - eff[i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eff[i] > 0.0)) {
      throw InfeasibleError(
          InfeasibleError::Kind::Bandwidth,
          "boundary " + std::to_string(i + 1) + " (" + spec.tiers[i].tech.name +
              "): effective bandwidth " + std::to_string(eff[i] / 1e9) +
              " GB/s; the hierarchy cannot sustain simultaneous double-buffered flow");
    }
  }
  return eff;
}

double boundary_time(double total_bytes, double alpha, std::size_t boundary,
                     const HierarchySpec& spec,
                     const std::vector<double>& eff_bw) {
  const double lambda = spec.tiers.at(boundary).tech.latency_s;
  return lambda + alpha * total_bytes / eff_bw.at(boundary);
}

double total_transfer_time(const TransferRequest& req,
                           const HierarchySpec& spec,
                           const std::vector<double>& eff_bw,
                           double bw_scale) {
  req.validate(spec.tiers.size());
  const std::size_t levels = spec.tiers.size();

  // Innermost-first recursion, evaluated iteratively from the deepest level.
  // x_i is the payload still to cross boundary i: the original payload minus
  // everything resident at shallower tiers.
  double deep_time = 0.0;
  double x_remaining = req.total_bytes;
  std::vector<double> x_at(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    x_at[i] = x_remaining;
    x_remaining -= req.placement[i] * req.total_bytes;
    if (x_remaining < 0.0) x_remaining = 0.0;  // guard fp slack in placement
  }
  for (std::size_t i = levels; i-- > 0;) {
    const double lambda = spec.tiers[i].tech.latency_s;
    const double tau_cur = lambda + x_at[i] / (eff_bw[i] * bw_scale);
    if (i + 1 == levels) {
      deep_time = tau_cur;  // deepest level: all remaining data is resident
    } else {
      // Fully overlapped when the deeper supply finishes within the current
      // boundary's own streaming time; otherwise the deeper levels dominate.
      deep_time = (deep_time <= tau_cur) ? tau_cur : deep_time;
    }
  }
  return deep_time;
}

double total_transfer_time(const TransferRequest& req,
                           const HierarchySpec& spec) {
  return total_transfer_time(req, spec, effective_bandwidths(spec), 1.0);
}

}  // namespace memx
