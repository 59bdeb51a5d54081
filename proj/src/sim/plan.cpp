// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/sim/plan.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include "dtnl/common/random.hpp"

namespace dtnl::sim {

std::uint64_t byte_budget(Millis duration, std::uint64_t link_rate_bps, std::uint32_t overhead_ppm) {
  if (duration <= 0) return 0;
  __extension__ using u128 = unsigned __int128;
  const u128 num = static_cast<u128>(duration) * link_rate_bps * (1'000'000u - overhead_ppm);
  return static_cast<std::uint64_t>(num / (static_cast<u128>(8) * 1000u * 1'000'000u));
}

Millis mule_offset(const SimConfig& c, std::uint32_t m) {
  return c.cycle_period * static_cast<Millis>(m) / static_cast<Millis>(c.mule_count);
}

std::vector<ContactWindow> build_contact_plan(const SimConfig& c) {
  validate(c);
  std::mt19937_64 rng(c.seed);
  const Millis cycles = c.duration / c.cycle_period + 1;
  std::vector<ContactWindow> plan;
  for (std::uint32_t m = 0; m < c.mule_count; ++m) {
    for (Millis k = 0; k < cycles; ++k) {
      for (const auto& s : c.stops) {
        const Millis d = c.contact_duration.is_fixed()
                             ? c.contact_duration.min
                             : static_cast<Millis>(uniform_u64(rng, static_cast<std::uint64_t>(c.contact_duration.min),
                                                               static_cast<std::uint64_t>(c.contact_duration.max)));
        const Millis start = k * c.cycle_period + s.phase + mule_offset(c, m);
        if (start >= c.duration) continue;
        plan.push_back({m, s.node, s.role, start, d, byte_budget(d, c.link_rate_bps, c.overhead_ppm)});
      }
    }
  }
  std::sort(plan.begin(), plan.end(), [](const ContactWindow& a, const ContactWindow& b) {
    return std::tie(a.start, a.mule, a.stop) < std::tie(b.start, b.mule, b.stop);
  });
  return plan;
}

}  // namespace dtnl::sim
