// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "memexplorer/errors.hpp"
#include "memexplorer/hierarchy.hpp"
#include "memexplorer/rng.hpp"
#include "memexplorer/tech_catalog.hpp"
#include "memexplorer/units.hpp"

using namespace memx;

namespace {

MemoryTechnology synthetic(const char* name, double latency_s, double bw,
                           bool onchip = false) {
  MemoryTechnology t;
  t.name = name;
  t.kind = onchip ? MemoryKind::OnChip : MemoryKind::OffChip;
  t.latency_s = latency_s;
  t.capacity_bytes = 1e12;
  t.bandwidth_bytes_per_s = bw;
  if (!onchip) t.shoreline_mm = 1.0;
  t.p_bg_w_per_byte = 1e-12;
  t.e_read_j_per_bit = 1e-12;
  t.e_write_j_per_bit = 1e-12;
  return t;
}

HierarchySpec two_tier() {
  // effective bandwidths [3, 1] TB/s from peaks [4, 1]
  HierarchySpec h;
  h.tiers = {TierInstance{synthetic("inner", 1e-9, 4e12, true), 1},
             TierInstance{synthetic("outer", 100e-9, 1e12), 1}};
  return h;
}

}  // namespace

TEST_CASE("effective bandwidths subtract the deeper inbound flow") {
  HierarchySpec single;
  single.tiers = {TierInstance{synthetic("only", 1e-9, 4e12, true), 1}};
  CHECK(effective_bandwidths(single) == std::vector<double>{4e12});

  auto eff = effective_bandwidths(two_tier());
  CHECK(eff[0] == doctest::Approx(3e12));
  CHECK(eff[1] == doctest::Approx(1e12));

  HierarchySpec saturated;
  saturated.tiers = {TierInstance{synthetic("a", 1e-9, 1e12, true), 1},
                     TierInstance{synthetic("b", 100e-9, 1e12), 1}};
  CHECK_THROWS_AS(effective_bandwidths(saturated), InfeasibleError);
  try {
    effective_bandwidths(saturated);
  } catch (const InfeasibleError& e) {
    CHECK(e.kind() == InfeasibleError::Kind::Bandwidth);
    CHECK(std::string(e.what()).find("boundary 1") != std::string::npos);
  }
}

TEST_CASE("boundary time is latency plus resident share over bandwidth") {
  HierarchySpec h = two_tier();
  auto eff = effective_bandwidths(h);
  // zero payload or zero share leave only the fixed latency
  CHECK(boundary_time(0.0, 1.0, 0, h, eff) == doctest::Approx(1e-9));
  CHECK(boundary_time(1e9, 0.0, 1, h, eff) == doctest::Approx(100e-9));
  // 1 GiB at 1 TB/s behind 100 ns
  CHECK(boundary_time(units::kGiB, 1.0, 1, h, eff) ==
        doctest::Approx(100e-9 + 1.073741824e9 / 1e12).epsilon(1e-12));
}

TEST_CASE("total transfer time reproduces the worked two-tier cases") {
  HierarchySpec h = two_tier();

  SUBCASE("single tier reduces to lambda + x/B") {
    HierarchySpec single;
    single.tiers = {TierInstance{synthetic("only", 1e-9, 3e12, true), 1}};
    TransferRequest req{units::kGiB, {1.0}};
    CHECK(total_transfer_time(req, single) ==
          doctest::Approx(1e-9 + units::kGiB / 3e12).epsilon(1e-12));
  }

  SUBCASE("all data resident at the inner tier: fully overlapped") {
    TransferRequest req{units::kGiB, {1.0, 0.0}};
    const double expected = 1e-9 + units::kGiB / 3e12;  // ~0.358 ms
    CHECK(total_transfer_time(req, h) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.358e-3).epsilon(2e-3));
  }

  SUBCASE("all data at the deep tier: bandwidth limited") {
    TransferRequest req{units::kGiB, {0.0, 1.0}};
    const double expected = 100e-9 + units::kGiB / 1e12;  // ~1.0738 ms
    CHECK(total_transfer_time(req, h) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.0738e-3).epsilon(2e-4));
  }
}

TEST_CASE("transfer-time monotonicity in payload and placement") {
  HierarchySpec h = two_tier();
  Rng rng(7, "hierarchy-prop");
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(1e6, 1e10);
    double a = rng.uniform();
    TransferRequest req{x, {a, 1.0 - a}};
    TransferRequest bigger{x * (1.0 + rng.uniform()), {a, 1.0 - a}};
    CHECK(total_transfer_time(bigger, h) >= total_transfer_time(req, h) - 1e-15);

    // shifting mass inward never hurts
    double shift = rng.uniform() * (1.0 - a);
    TransferRequest closer{x, {a + shift, 1.0 - a - shift}};
    CHECK(total_transfer_time(closer, h) <=
          total_transfer_time(req, h) + 1e-15);
  }
}

TEST_CASE("case boundary is continuous: tie returns the same value") {
  // Build a tie: T_deep == tau_cur. With alpha = [a, 1-a],
  // lambda2 + (1-a)x/B2 == lambda1 + x/B1.
  HierarchySpec h = two_tier();
  const double x = units::kGiB;
  const double tau_cur = 1e-9 + x / 3e12;
  const double a = 1.0 - (tau_cur - 100e-9) * 1e12 / x;
  REQUIRE(a > 0.0);
  REQUIRE(a < 1.0);
  TransferRequest req{x, {a, 1.0 - a}};
  const double t = total_transfer_time(req, h);
  CHECK(t == doctest::Approx(tau_cur).epsilon(1e-9));

  // a placement nudge of eps moves the deep branch by eps*x/B2; the result
  // must move by no more than that (no jump at the case switch)
  const double eps = 1e-9;
  const double delta = eps * x / 1e12;
  TransferRequest below{x, {a - eps, 1.0 - a + eps}};
  TransferRequest above{x, {a + eps, 1.0 - a - eps}};
  CHECK(std::abs(total_transfer_time(below, h) - t) <= delta * (1 + 1e-9));
  CHECK(std::abs(total_transfer_time(above, h) - t) <= delta * (1 + 1e-9));
}

TEST_CASE("placement validation") {
  HierarchySpec h = two_tier();
  TransferRequest bad_sum{1e9, {0.5, 0.6}};
  CHECK_THROWS_AS(total_transfer_time(bad_sum, h), ValidationError);
  TransferRequest bad_arity{1e9, {1.0}};
  CHECK_THROWS_AS(total_transfer_time(bad_arity, h), ValidationError);
  TransferRequest negative{-1.0, {1.0, 0.0}};
  CHECK_THROWS_AS(total_transfer_time(negative, h), ValidationError);
}
