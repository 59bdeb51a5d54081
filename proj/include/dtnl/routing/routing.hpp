// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dtnl/bundle/bundle.hpp"

namespace dtnl::routing {

struct Peer {
  NodeId id;
  NodeRole role = NodeRole::Rural;

  bool operator==(const Peer&) const = default;
};

/// Static rural-mule-urban line topology.
///
/// Next hop from each role toward a destination node:
///   Rural -> any Mule
///   Urban -> any Mule
///   Mule  -> the destination itself (mules never relay to other mules)
class RoleGraph {
 public:
  RoleGraph() = default;

  void add(const NodeId& id, NodeRole role);
  std::optional<NodeRole> role_of(const NodeId& id) const;
  bool contains(const NodeId& id) const { return nodes_.count(id) != 0; }
  const std::map<NodeId, NodeRole>& nodes() const { return nodes_; }

  /// True iff handing a bundle for `destination` from `self` to `peer` moves
  /// it one hop closer (or delivers it). False for unknown destinations.
  bool is_next_hop(const Peer& self, const Peer& peer, const NodeId& destination) const;

  /// Parses "id:role,id:role,...".
  static RoleGraph parse(std::string_view spec);
  std::string to_spec() const;

 private:
  std::map<NodeId, NodeRole> nodes_;
};

struct BundleMeta {
  BundleId id{};
  NodeId source;
  NodeId destination;
  std::uint64_t total_len = 0;
};

/// Whether `self` should offer the bundle to `peer`. `from_peer_this_session`
/// suppresses ping-pong of a bundle received from that peer in the same contact.
/// Unknown destinations log a warning and return false (the bundle stays until TTL).
bool should_offer(const BundleMeta& bundle, const Peer& self, const Peer& peer, const RoleGraph& graph,
                  bool from_peer_this_session = false);

enum class OfferDecision { Accept, RejectDuplicate, RejectQuota };

const char* to_string(OfferDecision d);

OfferDecision accept_offer(const BundleMeta& bundle, NodeRole self_role, std::uint64_t free_quota,
                           bool already_complete);

}  // namespace dtnl::routing
