// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dtnl/sim/config.hpp"

namespace dtnl::sim {

struct ContactWindow {
  std::uint32_t mule = 0;
  NodeId stop;
  NodeRole stop_role = NodeRole::Rural;
  Millis start = 0;
  Millis duration = 0;
  std::uint64_t byte_budget = 0;

  Millis end() const { return start + duration; }
  bool operator==(const ContactWindow&) const = default;
};

/// floor(duration × link_rate / 8 × (1 − overhead)), exact integer arithmetic.
std::uint64_t byte_budget(Millis duration, std::uint64_t link_rate_bps, std::uint32_t overhead_ppm);

/// Start offset of mule `m`: m × period / mule_count (even phasing).
Millis mule_offset(const SimConfig& config, std::uint32_t m);

/// Every window that starts before config.duration, sorted by
/// (start, mule, stop). Durations come from one generator seeded with
/// config.seed, drawn in (mule, cycle, stop) order over cycles
/// 0..floor(duration / period), stops in config order; a draw is made for
/// every (mule, cycle, stop) even when the window falls past the horizon.
/// Fixed durations consume no draws. Throws InvalidConfig.
std::vector<ContactWindow> build_contact_plan(const SimConfig& config);

}  // namespace dtnl::sim
