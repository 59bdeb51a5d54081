// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace dtnl {

/// Uniform integer in [lo, hi]. Defined here rather than through
/// std::uniform_int_distribution so draws are identical across standard
/// libraries.
inline std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t range = hi - lo + 1;
  if (range == 0) return rng();
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % range + 1) % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return lo + x % range;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace dtnl
