// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dtnl/bundle/store.hpp"
#include "dtnl/content/service.hpp"
#include "dtnl/gateway/gateway.hpp"
#include "dtnl/proto/session.hpp"
#include "dtnl/routing/routing.hpp"

namespace dtnl::node {

struct NodeOptions {
  routing::Peer self;
  routing::RoleGraph graph;
  StoreOptions store;
  /// Content/request/gateway state directory; empty keeps it in memory.
  std::filesystem::path app_root;
  bool sync = true;
  std::optional<NodeId> gateway;
  std::vector<NodeId> sync_targets;
  Millis request_ttl = content::kDefaultRequestTtl;
  Millis content_ttl = kDefaultBundleTtl;
  int max_retries = 3;
  Millis base_backoff = kMinute;
  proto::SessionTimers timers;
};

/// Callbacks for metrics and audit logs. All default to no-ops.
class NodeObserver {
 public:
  virtual ~NodeObserver() = default;
  virtual void bundle_created(const BundleHeader&, Millis) {}
  /// A bundle became Complete in this node's store via a transfer.
  virtual void bundle_completed(const BundleId&, Millis) {}
  /// A bundle addressed to this node was handed to the application.
  virtual void bundle_delivered(const BundleHeader&, Millis) {}
  virtual void custody_released(const BundleId&, Millis) {}
  virtual void request_resolved(const content::TopicRequest&, Millis) {}
  virtual void catalog_changed(Millis) {}
};

/// One DTN node: store, routing view, and the role's services. Drives
/// sessions through session_env() and apply(); the owner serializes calls.
class Node {
 public:
  /// `source` is required for urban nodes and ignored otherwise.
  Node(NodeOptions options, gateway::ArticleSource* source, NodeObserver* observer = nullptr);

  /// Delivers complete bundles addressed here that were not applied before
  /// a restart.
  void recover(Millis now);

  proto::SessionEnv session_env(bool initiator, Millis now) const;
  /// Applies a non-send action from a session. False means a local failure
  /// that must end the contact.
  bool apply(const proto::Action& action, Millis now);
  void session_finished(const proto::SessionState& state, Millis now);

  /// Bundle expiry and request timeouts.
  void expire(Millis now);
  /// expire() plus due fetch jobs.
  void tick(Millis now);
  /// Runs due fetch jobs only; returns the number of responses produced.
  std::size_t poll_gateway(Millis now);
  std::optional<Millis> next_gateway_due() const;

  const content::ContentItem& publish(const std::string& title, std::string body, Millis now);
  const content::TopicRequest& request_topic(const std::string& topic, Millis now);

  const NodeOptions& options() const { return options_; }
  const routing::Peer& self() const { return options_.self; }
  BundleStore& store() { return store_; }
  const BundleStore& store() const { return store_; }
  content::ContentService* content() { return content_.get(); }
  const content::ContentService* content() const { return content_.get(); }
  gateway::FetchGateway* fetch_gateway() { return gateway_.get(); }
  const std::map<NodeId, Millis>& peer_last_seen() const { return peer_last_seen_; }

  nlohmann::json status_json() const;

 private:
  void deliver(const BundleId& id, Millis now);
  void emit(const Bundle& bundle, Millis now);

  NodeOptions options_;
  NodeObserver null_observer_;
  NodeObserver* observer_;
  BundleStore store_;
  std::unique_ptr<content::ContentService> content_;
  std::unique_ptr<gateway::FetchGateway> gateway_;
  std::map<NodeId, Millis> peer_last_seen_;
};

}  // namespace dtnl::node
