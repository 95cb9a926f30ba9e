// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "memexplorer/errors.hpp"

namespace memx {

namespace {

constexpr double kInv_sqrt2 = 0.7071067811865476;
constexpr double kInv_sqrt2pi = 0.3989422804014327;

double norm_pdf(double z) { return kInv_sqrt2pi * std::exp(-0.5 * z * z); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInv_sqrt2); }

/// E[(u - Z)+] for Z ~ N(mu, sigma^2); the truncated-mean building block.
double psi(double u, double mu, double sigma) {
  if (std::isinf(u)) return u < 0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (sigma <= 0.0) return std::max(0.0, u - mu);
  const double z = (u - mu) / sigma;
  return sigma * (z * norm_cdf(z) + norm_pdf(z));
}

/// Sorted strictly-improving staircase of the non-dominated input points,
/// restricted to points that dominate r.
std::vector<Point2> staircase(std::vector<Point2> pts, const Point2& r) {
  std::erase_if(pts, [&](const Point2& p) { return p[0] >= r[0] || p[1] >= r[1]; });
  std::sort(pts.begin(), pts.end());
  std::vector<Point2> front;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (p[1] < best) {
      front.push_back(p);
      best = p[1];
    }
  }
  return front;
}

}  // namespace

double hypervolume_min2d(std::vector<Point2> points, const Point2& r) {
  const std::vector<Point2> front = staircase(std::move(points), r);
  double hv = 0.0;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double right = i + 1 < front.size() ? front[i + 1][0] : r[0];
    hv += (right - front[i][0]) * (r[1] - front[i][1]);
  }
  return hv;
}

double hypervolume(const std::vector<ObjectiveVector>& points,
                   const ObjectiveVector& reference) {
  std::vector<Point2> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(p.minimized());
  return hypervolume_min2d(std::move(pts), reference.minimized());
}

double ehvi_min2d(const Point2& mean, const Point2& std,
                  const std::vector<Point2>& pareto_front, const Point2& r) {
  if (std[0] < 0.0 || std[1] < 0.0) {
    throw ValidationError("ehvi: negative standard deviation");
  }
  const std::vector<Point2> front = staircase(pareto_front, r);

  // Strip i spans [A[i], A[i+1]) in the first objective with free height
  // H[i] in the second; A[0] = -inf, A[n+1] = r1, H[0] = r2.
  const std::size_t n = front.size();
  double total = 0.0;
  double psi_left = 0.0;  // psi(-inf) = 0
  for (std::size_t i = 0; i <= n; ++i) {
    const double right = i < n ? front[i][0] : r[0];
    const double height = i == 0 ? r[1] : front[i - 1][1];
    const double psi_right = psi(right, mean[0], std[0]);
    total += (psi_right - psi_left) * psi(height, mean[1], std[1]);
    psi_left = psi_right;
  }
  return std::max(0.0, total);
}

double ehvi(const ObjectiveVector& mean, double throughput_std,
            double power_std, const std::vector<ObjectiveVector>& front,
            const ObjectiveVector& reference) {
  std::vector<Point2> f;
  f.reserve(front.size());
  for (const auto& p : front) f.push_back(p.minimized());
  return ehvi_min2d(mean.minimized(), {throughput_std, power_std}, f,
                    reference.minimized());
}

double ehvi(const ObjectiveVector& mean, double throughput_std,
            double power_std, const ParetoArchive& archive) {
  return ehvi_min2d(mean.minimized(), {throughput_std, power_std},
                    archive.front_min(), archive.reference().minimized());
}

bool ParetoArchive::insert(const Entry& entry) {
  const Point2 p = entry.objectives.minimized();
  for (const auto& e : entries_) {
    const Point2 q = e.objectives.minimized();
    if (dominates_min(q, p) || (q[0] == p[0] && q[1] == p[1])) return false;
  }
  std::erase_if(entries_, [&](const Entry& e) {
    return dominates_min(p, e.objectives.minimized());
  });
  auto pos = std::lower_bound(
      entries_.begin(), entries_.end(), p, [](const Entry& e, const Point2& v) {
        return e.objectives.minimized() < v;
      });
  entries_.insert(pos, entry);
  return true;
}

double ParetoArchive::hypervolume() const {
  return memx::hypervolume(
      [&] {
        std::vector<ObjectiveVector> v;
        for (const auto& e : entries_) v.push_back(e.objectives);
        return v;
      }(),
      reference_);
}

std::vector<Point2> ParetoArchive::front_min() const {
  std::vector<Point2> f;
  f.reserve(entries_.size());
  for (const auto& e : entries_) f.push_back(e.objectives.minimized());
  return f;
}

bool ParetoArchive::dominated(const ObjectiveVector& objectives) const {
  const Point2 p = objectives.minimized();
  for (const auto& e : entries_) {
    if (dominates_min(e.objectives.minimized(), p)) return true;
  }
  return false;
}

}  // namespace memx
