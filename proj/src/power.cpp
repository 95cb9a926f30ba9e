// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/power.hpp"

#include <cmath>

#include "memexplorer/errors.hpp"
#include "memexplorer/units.hpp"

namespace memx {

double memory_tier_power(double capacity_bytes, double bw_read_bytes_per_s,
                         double bw_write_bytes_per_s,
                         const MemoryPowerCoefficients& coeffs,
                         double peak_bandwidth_bytes_per_s) {
  if (capacity_bytes < 0.0 || bw_read_bytes_per_s < 0.0 ||
      bw_write_bytes_per_s < 0.0) {
    throw ValidationError("memory_tier_power: inputs must be non-negative");
  }
  if (bw_read_bytes_per_s + bw_write_bytes_per_s >
      peak_bandwidth_bytes_per_s * (1.0 + 1e-9)) {
    throw ValidationError(
        "memory_tier_power: achieved read+write bandwidth exceeds the tier peak");
  }
  return coeffs.p_bg_w_per_byte * capacity_bytes +
         coeffs.e_read_j_per_bit * bw_read_bytes_per_s * units::kBitsPerByte +
         coeffs.e_write_j_per_bit * bw_write_bytes_per_s * units::kBitsPerByte;
}

void ComputePowerModel::validate() const {
  if (!(p_static_w > 0.0) || !(p_mac_peak_w > 0.0) || !(p_vec_peak_w > 0.0) ||
      !(clock_hz > 0.0)) {
    throw ValidationError("compute power model: all coefficients must be positive");
  }
}

ComputePowerModel calibrated_compute_power() {
  // Anchor: reference compute (2048x128, VLEN 2048) + SRAM2D x1 + HBM3E x4 at
  // peak read = 300.1 W. Memory side from the registry midpoint coefficients:
  //   SRAM2D: 30 W/GB * 0.256 GB + 0.1 pJ/bit * 32 Tbit/s  = 10.88 W
  //   HBM3E:  75 mW/GB * 96 GB   + 3 pJ/bit   * 32 Tbit/s  = 103.20 W
  // leaving 186.02 W for compute at full utilization.
  constexpr double kComputePeak = 300.1 - 114.08;
  ComputePowerModel m;
  m.p_static_w = 0.15 * kComputePeak;
  m.p_mac_peak_w = 0.85 * (kComputePeak - m.p_static_w);
  m.p_vec_peak_w = 0.15 * (kComputePeak - m.p_static_w);
  m.clock_hz = 1e9;
  return m;
}

double compute_power(double pe_count, double vlen, double matrix_utilization,
                     double vector_utilization, const ComputePowerModel& model) {
  if (matrix_utilization < 0.0 || matrix_utilization > 1.0 + 1e-9 ||
      vector_utilization < 0.0 || vector_utilization > 1.0 + 1e-9) {
    throw ValidationError("compute_power: utilizations must be in [0, 1]");
  }
  return model.p_static_w +
         model.p_mac_peak_w * (pe_count / ComputePowerModel::kRefPeCount) *
             matrix_utilization +
         model.p_vec_peak_w * (vlen / ComputePowerModel::kRefVlen) *
             vector_utilization;
}

PowerReport system_power(const HierarchySpec& hierarchy, double pe_count,
                         double vlen, const ActivityProfile& activity,
                         const ComputePowerModel& model) {
  if (activity.tiers.size() != hierarchy.tiers.size()) {
    throw ValidationError("system_power: activity must cover every tier");
  }
  PowerReport report;
  report.compute_w = compute_power(pe_count, vlen, activity.matrix_utilization,
                                   activity.vector_utilization, model);
  report.avg_power_w = report.compute_w;
  report.tdp_w = compute_power(pe_count, vlen, 1.0, 1.0, model);

  for (std::size_t i = 0; i < hierarchy.tiers.size(); ++i) {
    const TierInstance& tier = hierarchy.tiers[i];
    const auto coeffs = MemoryPowerCoefficients::from(tier.tech);
    const double cap = tier.aggregate_capacity();
    const double peak = tier.aggregate_peak_bandwidth();
    const TierActivity& act = activity.tiers[i];

    TierPowerBreakdown b;
    b.tier = tier.tech.name + "x" + std::to_string(tier.units);
    b.background_w = coeffs.p_bg_w_per_byte * cap;
    b.read_w =
        coeffs.e_read_j_per_bit * act.bw_read_bytes_per_s * units::kBitsPerByte;
    b.write_w = coeffs.e_write_j_per_bit * act.bw_write_bytes_per_s *
                units::kBitsPerByte;
    // Contract check against the tier peak; reuses the scalar entry point.
    (void)memory_tier_power(cap, act.bw_read_bytes_per_s,
                            act.bw_write_bytes_per_s, coeffs, peak);
    report.per_tier.push_back(b);
    report.avg_power_w += b.background_w + b.read_w + b.write_w;
    report.tdp_w += memory_tier_power(cap, peak, 0.0, coeffs, peak);
  }
  return report;
}

}  // namespace memx
