// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dtnl/sim/sim.hpp"

namespace dtnl::sim {

/// Monte Carlo estimate of the wait from a uniformly random request time in
/// [from, to) to the next window start at or after it. Sample i draws its
/// time from splitmix64(seed + i), so the serial and parallel kernels see the
/// same samples and, summing integers, return identical totals.
struct PickupWait {
  std::uint64_t samples = 0;
  std::uint64_t total_wait_ms = 0;
  /// Samples with no later window (excluded from the mean).
  std::uint64_t unserved = 0;
  double mean_ms() const {
    const auto n = samples - unserved;
    return n ? static_cast<double>(total_wait_ms) / static_cast<double>(n) : 0.0;
  }
};

/// `starts` must be sorted ascending.
PickupWait pickup_wait_serial(const std::vector<Millis>& starts, Millis from, Millis to, std::uint64_t samples,
                              std::uint64_t seed);
PickupWait pickup_wait_parallel(const std::vector<Millis>& starts, Millis from, Millis to, std::uint64_t samples,
                                std::uint64_t seed);

/// Sorted window starts at `stop` from a contact plan.
std::vector<Millis> window_starts(const std::vector<ContactWindow>& plan, const NodeId& stop);

/// Independent simulation runs, one per config, results in input order.
std::vector<SimResult> run_sweep_serial(const std::vector<SimConfig>& configs);
std::vector<SimResult> run_sweep_parallel(const std::vector<SimConfig>& configs);

/// Copies of `base` with `key` set to each integer in [lo, hi].
std::vector<SimConfig> sweep_configs(const SimConfig& base, const std::string& key, std::int64_t lo, std::int64_t hi);

}  // namespace dtnl::sim
