// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/node/contact.hpp"

namespace dtnl::node {

ContactReport run_contact(Node& initiator, Node& responder, std::uint64_t byte_budget, Millis now) {
  proto::Session a(initiator.session_env(true, now));
  proto::Session b(responder.session_env(false, now));
  ContactReport report;
  report.pipe = proto::run_pipe(
      a, b, byte_budget, now, [&](const proto::Action& x) { return initiator.apply(x, now); },
      [&](const proto::Action& x) { return responder.apply(x, now); });
  initiator.session_finished(a.state(), now);
  responder.session_finished(b.state(), now);
  report.initiator = a.state();
  report.responder = b.state();
  return report;
}

}  // namespace dtnl::node
