// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/error.hpp"

namespace dtnl {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::ZeroTtl: return "ZeroTtl";
    case Errc::OversizePayload: return "OversizePayload";
    case Errc::EmptyPayload: return "EmptyPayload";
    case Errc::StorageFull: return "StorageFull";
    case Errc::IoFailure: return "IoFailure";
    case Errc::NotFound: return "NotFound";
    case Errc::ProtocolViolation: return "ProtocolViolation";
    case Errc::EmptyTitle: return "EmptyTitle";
    case Errc::EmptyTopic: return "EmptyTopic";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::WorkloadError: return "WorkloadError";
    case Errc::AssumptionViolated: return "AssumptionViolated";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

}  // namespace dtnl
