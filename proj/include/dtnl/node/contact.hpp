// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dtnl/node/node.hpp"
#include "dtnl/proto/pipe.hpp"

namespace dtnl::node {

struct ContactReport {
  proto::PipeOutcome pipe;
  proto::SessionState initiator;
  proto::SessionState responder;
};

/// One in-process contact: sessions on both nodes over a byte-budgeted pipe,
/// every event stamped `now`. `initiator` takes the first data turn.
ContactReport run_contact(Node& initiator, Node& responder, std::uint64_t byte_budget, Millis now);

}  // namespace dtnl::node
