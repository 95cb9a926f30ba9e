// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

namespace memx {

/// Search objectives: throughput is maximized, power minimized. Internally
/// every routine works in a pure-minimization convention (throughput negated).
struct ObjectiveVector {
  double throughput_tps = 0.0;
  double power_w = 0.0;

  std::array<double, 2> minimized() const { return {-throughput_tps, power_w}; }
};

using Point2 = std::array<double, 2>;

/// a dominates b (minimization): no worse in both, strictly better somewhere.
inline bool dominates_min(const Point2& a, const Point2& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

/// Exact 2-D dominated hypervolume against reference `r` (minimization).
/// Points that do not dominate the reference contribute nothing.
double hypervolume_min2d(std::vector<Point2> points, const Point2& r);

/// Hypervolume in the native (maximize throughput, minimize power) frame.
double hypervolume(const std::vector<ObjectiveVector>& points,
                   const ObjectiveVector& reference);

/// Exact two-objective expected hypervolume improvement for an independent
/// Gaussian candidate (means/stds per objective, minimization convention).
/// Closed form over the vertical strips of the non-dominated region; each
/// strip contributes E[(upper - Z1)+ - (lower - Z1)+] * E[(height - Z2)+].
double ehvi_min2d(const Point2& mean, const Point2& std,
                  const std::vector<Point2>& pareto_front, const Point2& r);

/// EHVI in the native objective frame; `throughput_std`/`power_std` are the
/// surrogate posterior standard deviations.
double ehvi(const ObjectiveVector& mean, double throughput_std,
            double power_std, const std::vector<ObjectiveVector>& front,
            const ObjectiveVector& reference);

class ParetoArchive;
/// EHVI against an archive's front and reference point.
double ehvi(const ObjectiveVector& mean, double throughput_std,
            double power_std, const ParetoArchive& archive);

/// Non-dominated archive with a fixed reference point.
class ParetoArchive {
 public:
  struct Entry {
    std::string design_id;
    ObjectiveVector objectives;
  };

  ParetoArchive() = default;
  explicit ParetoArchive(ObjectiveVector reference) : reference_(reference) {}

  /// Inserts if non-dominated; evicts members the new entry dominates.
  /// Returns true when the entry joined the archive.
  bool insert(const Entry& entry);

  const std::vector<Entry>& entries() const { return entries_; }
  const ObjectiveVector& reference() const { return reference_; }
  double hypervolume() const;
  std::vector<Point2> front_min() const;
  bool dominated(const ObjectiveVector& objectives) const;

 private:
  ObjectiveVector reference_{0.0, 0.0};
  std::vector<Entry> entries_;  // kept sorted by minimized first objective
};

}  // namespace memx
