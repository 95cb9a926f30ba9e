// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace memx::units {

// Decimal SI prefixes. Memory capacities and bandwidths follow vendor
// datasheet convention (1 GB = 1e9 bytes, 1 TB/s = 1e12 B/s).
inline constexpr double kKilo = 1e3;
inline constexpr double kMega = 1e6;
inline constexpr double kGiga = 1e9;
inline constexpr double kTera = 1e12;

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;
inline constexpr double kMiB = 1024.0 * 1024.0;

inline constexpr double kNanoseconds = 1e-9;
inline constexpr double kMicroseconds = 1e-6;
inline constexpr double kMilliwatt = 1e-3;
inline constexpr double kPicojoule = 1e-12;

inline constexpr double kBitsPerByte = 8.0;

}  // namespace memx::units
