// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtnl/bundle/bundle.hpp"

namespace dtnl::content {

enum class RequestStatus { PendingPickup = 0, InTransit = 1, AtGateway = 2, Fulfilled = 3, Failed = 4 };

const char* to_string(RequestStatus s);
RequestStatus parse_status(std::string_view s);
inline bool terminal(RequestStatus s) { return s == RequestStatus::Fulfilled || s == RequestStatus::Failed; }

struct TopicRequest {
  std::string request_id;  // hex
  std::string topic;
  NodeId requester;
  RequestStatus status = RequestStatus::PendingPickup;
  std::string fail_reason;
  Millis created_at = 0;
  std::optional<Millis> resolved_at;
  /// The TopicRequest bundle carrying it (rural side).
  std::optional<BundleId> bundle_id;
  /// Every status entered, with its time; starts with the initial status.
  std::vector<std::pair<RequestStatus, Millis>> history;
};

/// Hex SHA-256 over (str16 topic, str16 requester, i64 created_at).
std::string request_id_of(const std::string& topic, const NodeId& requester, Millis created_at);

/// Topic requests keyed by id. Persists as requests.jsonl (full record per
/// change, last line per id wins) when given a root directory.
class RequestTable {
 public:
  explicit RequestTable(std::filesystem::path root = {}, bool sync = true);

  const TopicRequest& insert(TopicRequest r);
  /// Moves forward along the lifecycle, entering each skipped state in turn.
  /// Returns false (no change) if `to` is not ahead of the current status or
  /// the request is terminal.
  bool advance(const std::string& id, RequestStatus to, Millis now, const std::string& reason = {});

  const TopicRequest* find(const std::string& id) const;
  const TopicRequest* find_open(const std::string& topic, const NodeId& requester) const;
  const TopicRequest* find_by_bundle(const BundleId& id) const;
  /// Ordered by (created_at, request_id).
  std::vector<const TopicRequest*> list() const;
  std::size_t size() const { return rows_.size(); }

 private:
  void persist(const TopicRequest& r);
  void load();

  std::filesystem::path root_;
  bool sync_;
  std::map<std::string, TopicRequest> rows_;
};

}  // namespace dtnl::content
