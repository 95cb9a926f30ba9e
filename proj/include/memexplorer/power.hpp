// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "memexplorer/hierarchy.hpp"

namespace memx {

/// Per-technology power coefficients (copied from the catalog entry).
struct MemoryPowerCoefficients {
  double p_bg_w_per_byte = 0.0;
  double e_read_j_per_bit = 0.0;
  double e_write_j_per_bit = 0.0;

  static MemoryPowerCoefficients from(const MemoryTechnology& t) {
    return {t.p_bg_w_per_byte, t.e_read_j_per_bit, t.e_write_j_per_bit};
  }
};

/// Background power on installed capacity plus per-bit dynamic energy at the
/// achieved read/write bandwidths: p_bg*C + e_read*BW_read + e_write*BW_write.
/// Bandwidths are bytes/s and converted to bits/s for the dynamic terms.
/// `peak_bandwidth` (bytes/s) bounds read+write; exceeding it is a contract
/// violation.
double memory_tier_power(double capacity_bytes, double bw_read_bytes_per_s,
                         double bw_write_bytes_per_s,
                         const MemoryPowerCoefficients& coeffs,
                         double peak_bandwidth_bytes_per_s);

/// Parametric compute power. The reference operating point is a 2048x128 PE
/// array with VLEN 2048 at 1 GHz; power scales linearly in PE count and VLEN.
struct ComputePowerModel {
  double p_static_w = 27.903;     // leakage + always-on
  double p_mac_peak_w = 134.39945;  // matrix units at 100% utilization, reference array
  double p_vec_peak_w = 23.71755;   // vector unit at 100% utilization, reference VLEN
  double clock_hz = 1e9;

  static constexpr double kRefPeCount = 2048.0 * 128.0;
  static constexpr double kRefVlen = 2048.0;

  void validate() const;  // throws ValidationError
};

/// Defaults calibrated so that a 2048x128/VLEN-2048 device with one
/// conventional SRAM die and four HBM3E stacks lands at a 300.1 W TDP, with
/// static power fixed at 15% of the compute peak and the remainder split
/// 85/15 between matrix and vector units.
ComputePowerModel calibrated_compute_power();

double compute_power(double pe_count, double vlen, double matrix_utilization,
                     double vector_utilization, const ComputePowerModel& model);

/// Achieved activity for one tier during a stage.
struct TierActivity {
  double bw_read_bytes_per_s = 0.0;
  double bw_write_bytes_per_s = 0.0;
};

struct ActivityProfile {
  std::vector<TierActivity> tiers;  // one per hierarchy tier
  double matrix_utilization = 0.0;
  double vector_utilization = 0.0;
};

struct TierPowerBreakdown {
  std::string tier;
  double background_w = 0.0;
  double read_w = 0.0;
  double write_w = 0.0;
};

struct PowerReport {
  double avg_power_w = 0.0;  // compute at achieved utilization + tiers at achieved bandwidth
  double tdp_w = 0.0;        // compute at full utilization + tiers at peak read bandwidth
  double compute_w = 0.0;
  std::vector<TierPowerBreakdown> per_tier;
};

PowerReport system_power(const HierarchySpec& hierarchy, double pe_count,
                         double vlen, const ActivityProfile& activity,
                         const ComputePowerModel& model);

/// TDP budget check, inclusive at the boundary.
inline bool check_tdp(const PowerReport& report, double budget_w) {
  return report.tdp_w <= budget_w;
}

}  // namespace memx
