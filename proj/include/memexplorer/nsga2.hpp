// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "memexplorer/pareto.hpp"

namespace memx {

/// Fronts of non-dominated sorting (minimization): result[i] holds the
/// indices of rank-i individuals.
std::vector<std::vector<std::size_t>> non_dominated_sort(
    const std::vector<Point2>& objectives);

/// Crowding distance within one front; boundary individuals get +infinity.
std::vector<double> crowding_distance(const std::vector<Point2>& objectives,
                                      const std::vector<std::size_t>& front);

/// Rank (front index) per individual, dense over the population.
std::vector<std::size_t> dominance_ranks(const std::vector<Point2>& objectives);

}  // namespace memx
