// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memexplorer/hierarchy.hpp"

namespace memx {

/// Chunked simulation of one bulk transfer. Serves as the independent check
/// on the closed-form transfer model: same bandwidths and latencies, but data
/// moves as discrete chunks through store-and-forward boundaries instead of
/// as a continuous fluid.
struct OracleConfig {
  double chunk_bytes = 1024.0 * 1024.0;  // 1 MiB
  HierarchySpec hierarchy;
  TransferRequest placement;
};

/// Event-driven evaluation: each boundary i serializes chunk crossings at its
/// effective bandwidth and opens after a fixed once-per-request latency; a
/// chunk leaves a level only after fully arriving there (double buffering at
/// chunk granularity). Returns the completion time of the last chunk at the
/// compute level.
double simulate_transfer(const OracleConfig& cfg);

struct OracleCase {
  std::size_t index = 0;
  double payload_bytes = 0.0;
  double analytic_s = 0.0;
  double simulated_s = 0.0;
  double rel_err = 0.0;
  std::string hierarchy_desc;
};

struct OracleReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  std::vector<OracleCase> cases;
  std::vector<OracleCase> failures;  // cases with rel_err > tolerance
};

/// Samples `n_cases` random feasible hierarchies (depth <= 4, technologies
/// from `catalog`, simplex-uniform placement, payload uniform in
/// [1 MB, 10 GB]) and compares the analytic transfer time against the
/// chunked simulation at `chunk_bytes` granularity.
OracleReport validate_against_analytic(std::size_t n_cases, std::uint64_t seed,
                                       double tolerance,
                                       const Catalog& catalog,
                                       double chunk_bytes = 1024.0 * 1024.0);

}  // namespace memx
