// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace memx {

/// Scrambled Sobol low-discrepancy sequence. Direction numbers are built from
/// the first primitive polynomials over GF(2) (found by exhaustive primitivity
/// testing, so no external table is needed) with fixed odd initial values;
/// each (seed, dimension) applies a random digital shift, which preserves the
/// dyadic equidistribution of the base sequence.
class SobolSequence {
 public:
  SobolSequence(unsigned dimensions, std::uint64_t seed);

  /// Next point in [0,1)^d.
  std::vector<double> next();

  /// Points generated so far.
  std::uint64_t count() const { return index_; }

 private:
  unsigned dims_;
  std::uint64_t index_ = 0;
  std::vector<std::vector<std::uint32_t>> direction_;  // [dim][bit]
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

}  // namespace memx
