// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/nsga2.hpp"

#include <algorithm>
#include <limits>

namespace memx {

std::vector<std::vector<std::size_t>> non_dominated_sort(
    const std::vector<Point2>& objectives) {
  const std::size_t n = objectives.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates_min(objectives[p], objectives[q])) {
        dominated_by[p].push_back(q);
      } else if (dominates_min(objectives[q], objectives[p])) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  std::size_t i = 0;
  while (!fronts[i].empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[i]) {
      for (std::size_t q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    ++i;
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();  // trailing empty front
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<Point2>& objectives,
                                      const std::vector<std::size_t>& front) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(front.size(), 0.0);
  if (front.size() <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  for (int m = 0; m < 2; ++m) {
    std::vector<std::size_t> order(front.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return objectives[front[a]][m] < objectives[front[b]][m];
    });
    const double lo = objectives[front[order.front()]][m];
    const double hi = objectives[front[order.back()]][m];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (hi <= lo) continue;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      dist[order[i]] += (objectives[front[order[i + 1]]][m] -
                         objectives[front[order[i - 1]]][m]) /
                        (hi - lo);
    }
  }
  return dist;
}

std::vector<std::size_t> dominance_ranks(const std::vector<Point2>& objectives) {
  std::vector<std::size_t> rank(objectives.size(), 0);
  auto fronts = non_dominated_sort(objectives);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    for (std::size_t i : fronts[r]) rank[i] = r;
  }
  return rank;
}

}  // namespace memx
