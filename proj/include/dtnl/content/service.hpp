// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dtnl/bundle/store.hpp"
#include "dtnl/content/app_message.hpp"
#include "dtnl/content/catalog.hpp"
#include "dtnl/content/requests.hpp"

namespace dtnl::content {

inline constexpr Millis kDefaultRequestTtl = 3 * kDay;

struct ServiceOptions {
  NodeId self;
  NodeRole role = NodeRole::Rural;
  /// Urban node that resolves topic requests (rural nodes).
  std::optional<NodeId> gateway;
  /// Nodes that receive a ContentUpdate bundle for each local publish.
  std::vector<NodeId> sync_targets;
  Millis request_ttl = kDefaultRequestTtl;
  Millis content_ttl = kDefaultBundleTtl;
  /// Directory for catalog, requests and the applied/quarantine logs; empty
  /// keeps everything in memory.
  std::filesystem::path root;
  bool sync = true;
  /// Called for every bundle the service puts into the store.
  std::function<void(const BundleHeader&, Millis)> on_bundle_created;
};

/// A topic request that reached the gateway and should become a fetch job.
struct FetchOrder {
  std::string request_id;
  std::string topic;
  NodeId requester;
};

enum class ApplyStatus { Applied, AlreadyApplied, Quarantined, Ignored };

struct ApplyResult {
  ApplyStatus status = ApplyStatus::Ignored;
  std::optional<FetchOrder> fetch;
  /// Set when this bundle fulfilled or failed a local request.
  std::optional<std::string> resolved_request;
};

/// Application layer at rural and urban nodes. Single writer: the owner
/// serializes calls.
class ContentService {
 public:
  ContentService(ServiceOptions options, BundleStore& store);

  /// New version of `title`; also queues ContentUpdate bundles to sync targets.
  /// Throws EmptyTitle, InvalidArgument (body not UTF-8).
  const ContentItem& publish(const std::string& title, std::string body, Millis now);

  /// Idempotent while an open request for the same topic exists.
  /// Throws EmptyTopic, InvalidConfig (no gateway configured).
  const TopicRequest& request_topic(const std::string& topic, Millis now);

  /// Dispatches a complete bundle destined to this node; effects happen at
  /// most once per bundle id.
  ApplyResult apply_incoming(const Bundle& bundle, Millis now);

  /// The store handed `id` to the next hop.
  void on_custody_released(const BundleId& id, Millis now);
  /// Fails open requests whose request bundle lifetime has run out.
  std::vector<std::string> expire_requests(Millis now);

  bool applied(const BundleId& id) const { return applied_.count(id) != 0; }
  bool quarantined(const BundleId& id) const { return quarantine_.count(id) != 0; }

  const Catalog& catalog() const { return catalog_; }
  const RequestTable& requests() const { return requests_; }
  const ServiceOptions& options() const { return options_; }

 private:
  void mark_applied(const BundleId& id);
  void upsert(const std::string& title, const std::string& body, Origin origin, Millis updated_at,
              std::optional<std::uint32_t> version);

  ServiceOptions options_;
  BundleStore& store_;
  Catalog catalog_;
  RequestTable requests_;
  std::set<BundleId> applied_;
  std::set<BundleId> quarantine_;
};

}  // namespace dtnl::content
