// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dtnl {

enum class Errc {
  ZeroTtl,
  OversizePayload,
  EmptyPayload,
  StorageFull,
  IoFailure,
  NotFound,
  ProtocolViolation,
  EmptyTitle,
  EmptyTopic,
  MalformedPayload,
  EmptyAfterNormalization,
  InvalidConfig,
  WorkloadError,
  AssumptionViolated,
  ScenarioInvalid,
  InvalidArgument,
  BindFailure,
};

const char* to_string(Errc code);

/// Exception carrying a stable error code. All fallible public operations in
/// this project throw `dtnl::Error`; the frame decoder is the exception
/// (it reports typed statuses because truncation is a normal condition).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dtnl
