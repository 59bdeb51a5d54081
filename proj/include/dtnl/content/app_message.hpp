// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "dtnl/common/bytes.hpp"
#include "dtnl/common/time.hpp"

namespace dtnl::content {

inline constexpr int kSchemaVersion = 1;

enum class Origin { LocalAuthor, FetchedRemote };

const char* to_string(Origin o);
Origin parse_origin(std::string_view s);

struct TopicRequestMsg {
  std::string request_id;
  std::string topic;
  bool operator==(const TopicRequestMsg&) const = default;
};

struct ContentUpdateMsg {
  std::string title;
  std::uint32_t version = 1;
  std::string body;
  Origin origin = Origin::LocalAuthor;
  Millis updated_at = 0;
  bool operator==(const ContentUpdateMsg&) const = default;
};

/// Gateway answer to a topic request. On error, `reason` is set and
/// title/body are empty.
struct ContentResponseMsg {
  std::string request_id;
  std::string topic;
  bool ok = true;
  std::string reason;
  std::string title;
  std::string body;
  Millis updated_at = 0;
  bool operator==(const ContentResponseMsg&) const = default;
};

using AppMessage = std::variant<TopicRequestMsg, ContentUpdateMsg, ContentResponseMsg>;

/// JSON object with "type" and "schema" plus type-specific fields.
Bytes serialize(const AppMessage& m);

/// Throws Error(MalformedPayload) on bad JSON, unknown type, wrong schema
/// or missing fields.
AppMessage parse_app_message(ByteView payload);

}  // namespace dtnl::content
