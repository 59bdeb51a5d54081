// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/proto/pipe.hpp"

#include <deque>

namespace dtnl::proto {

PipeOutcome run_pipe(Session& a, Session& b, std::uint64_t byte_budget, Millis now, const ActionSink& sink_a,
                     const ActionSink& sink_b) {
  struct InFlight {
    bool to_b;
    Frame frame;
  };
  std::deque<InFlight> queue;
  PipeOutcome out;
  bool failed = false;

  auto dispatch = [&](bool from_a, std::vector<Action> actions) {
    const auto& sink = from_a ? sink_a : sink_b;
    for (auto& action : actions) {
      if (auto* send = std::get_if<SendFrame>(&action)) {
        queue.push_back({from_a, std::move(send->frame)});
        continue;
      }
      if (std::holds_alternative<CloseLink>(action)) continue;
      if (sink && !sink(action)) {
        failed = true;
        return;
      }
    }
  };

  auto link_down = [&] {
    if (!a.state().terminal()) dispatch(true, a.step(LinkDown{now}));
    if (!b.state().terminal()) dispatch(false, b.step(LinkDown{now}));
  };

  dispatch(true, a.step(LinkUp{now}));
  dispatch(false, b.step(LinkUp{now}));

  std::uint64_t remaining = byte_budget;
  while (!failed && !(a.state().terminal() && b.state().terminal())) {
    if (queue.empty()) {
      out.stalled = true;
      break;
    }
    auto next = std::move(queue.front());
    queue.pop_front();
    const auto size = encoded_size(next.frame);
    if (size > remaining) {
      out.budget_exhausted = true;
      break;
    }
    remaining -= size;
    out.bytes_delivered += size;
    ++out.frames_delivered;
    Session& dest = next.to_b ? b : a;
    if (dest.state().terminal()) continue;
    dispatch(!next.to_b, dest.step(FrameReceived{std::move(next.frame), now}));
  }
  out.local_failure = failed;
  link_down();
  return out;
}

}  // namespace dtnl::proto
