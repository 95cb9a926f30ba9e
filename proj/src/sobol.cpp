// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/sobol.hpp"

#include <bit>
#include <stdexcept>

#include "memexplorer/rng.hpp"

namespace memx {

namespace {

constexpr int kBits = 32;

/// Polynomial multiplication mod p over GF(2); polynomials as bitmasks.
std::uint32_t gf2_mulmod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  const int deg = std::bit_width(p) - 1;
  std::uint32_t r = 0;
  while (b) {
    if (b & 1u) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << deg)) a ^= p;
  }
  return r;
}

std::uint32_t gf2_powmod(std::uint32_t base, std::uint64_t e, std::uint32_t p) {
  std::uint32_t r = 1;
  while (e) {
    if (e & 1ULL) r = gf2_mulmod(r, base, p);
    base = gf2_mulmod(base, base, p);
    e >>= 1;
  }
  return r;
}

/// Primitive over GF(2): x generates the full multiplicative group of
/// GF(2^deg). Degrees up to 8 cover 50+ dimensions, so hard-coded factor
/// lists of 2^deg - 1 suffice.
bool is_primitive(std::uint32_t poly) {
  const int deg = std::bit_width(poly) - 1;
  if (deg < 1 || !(poly & 1u)) return false;
  static const std::vector<std::vector<std::uint64_t>> factors = {
      {},            // deg 1: 2^1-1 = 1
      {3},           // 3
      {7},           // 7
      {3, 5},        // 15
      {31},          // 31
      {3, 7},        // 63
      {127},         // 127
      {3, 5, 17},    // 255
  };
  if (deg > 8) throw std::runtime_error("sobol: polynomial degree > 8 unsupported");
  const std::uint64_t order = (1ULL << deg) - 1;
  if (gf2_powmod(2, order, poly) != 1u) return false;  // x^order == 1
  for (std::uint64_t q : factors[deg - 1]) {
    if (gf2_powmod(2, order / q, poly) == 1u) return false;
  }
  return true;
}

/// First `n` primitive polynomials in ascending integer order.
std::vector<std::uint32_t> primitive_polys(unsigned n) {
  std::vector<std::uint32_t> polys;
  for (std::uint32_t cand = 3; polys.size() < n; ++cand) {
    if (is_primitive(cand)) polys.push_back(cand);
  }
  return polys;
}

}  // namespace

SobolSequence::SobolSequence(unsigned dimensions, std::uint64_t seed)
    : dims_(dimensions),
      direction_(dimensions, std::vector<std::uint32_t>(kBits)),
      state_(dimensions, 0),
      shift_(dimensions, 0) {
  if (dimensions == 0) throw std::runtime_error("sobol: zero dimensions");

  // Dimension 0 is the van der Corput sequence.
  for (int k = 0; k < kBits; ++k) direction_[0][k] = 1u << (kBits - 1 - k);

  const std::vector<std::uint32_t> polys =
      dims_ > 1 ? primitive_polys(dims_ - 1) : std::vector<std::uint32_t>{};
  for (unsigned d = 1; d < dims_; ++d) {
    const std::uint32_t poly = polys[d - 1];
    const int deg = std::bit_width(poly) - 1;
    // Fixed odd initial direction integers m_k < 2^k (any such choice yields
    // a valid Sobol construction; quality is checked by the equidistribution
    // tests).
    std::vector<std::uint32_t> m(kBits + 1);
    std::uint64_t sm = 0x5EED5EEDULL + 7919ULL * d;
    for (int k = 1; k <= deg && k <= kBits; ++k) {
      m[k] = static_cast<std::uint32_t>(splitmix64(sm) & ((1u << k) - 1)) | 1u;
    }
    for (int k = deg + 1; k <= kBits; ++k) {
      std::uint32_t v = m[k - deg] ^ (m[k - deg] << deg);
      for (int j = 1; j < deg; ++j) {
        if ((poly >> (deg - j)) & 1u) v ^= m[k - j] << j;
      }
      m[k] = v;
    }
    for (int k = 1; k <= kBits; ++k) {
      direction_[d][k - 1] = m[k] << (kBits - k);
    }
  }

  Rng rng(seed, "sobol-shift");
  for (unsigned d = 0; d < dims_; ++d) {
    shift_[d] = static_cast<std::uint32_t>(rng.next_u64() >> 32);
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> point(dims_);
  if (index_ > 0) {
    const unsigned bit =
        static_cast<unsigned>(std::countr_zero(index_));  // Gray-code step
    for (unsigned d = 0; d < dims_; ++d) state_[d] ^= direction_[d][bit];
  }
  for (unsigned d = 0; d < dims_; ++d) {
    point[d] = (state_[d] ^ shift_[d]) * 0x1.0p-32;
  }
  ++index_;
  return point;
}

}  // namespace memx
