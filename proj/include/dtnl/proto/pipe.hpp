// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "dtnl/proto/session.hpp"

namespace dtnl::proto {

/// Applies a non-SendFrame action on one side. Returning false reports a
/// local failure (e.g. completion verification) and drops the link.
using ActionSink = std::function<bool(const Action&)>;

struct PipeOutcome {
  std::uint64_t bytes_delivered = 0;
  std::uint64_t frames_delivered = 0;
  bool budget_exhausted = false;
  bool local_failure = false;
  bool stalled = false;
};

/// In-process link between two sessions. Frames are delivered in global send
/// order; each delivered frame debits its encoded size from a byte budget
/// shared by both directions. A frame that no longer fits is lost and both
/// sides see LinkDown, as when a contact window closes mid-transfer.
/// `a` is stepped with LinkUp first and should be the initiator.
PipeOutcome run_pipe(Session& a, Session& b, std::uint64_t byte_budget, Millis now, const ActionSink& sink_a,
                     const ActionSink& sink_b);

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

}  // namespace dtnl::proto
