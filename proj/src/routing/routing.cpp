// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/routing/routing.hpp"

#include "dtnl/common/error.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl::routing {

void RoleGraph::add(const NodeId& id, NodeRole role) {
  auto [it, inserted] = nodes_.emplace(id, role);
  if (!inserted && it->second != role)
    throw Error(Errc::InvalidConfig, "node " + id.str() + " configured with two roles");
}

std::optional<NodeRole> RoleGraph::role_of(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

bool RoleGraph::is_next_hop(const Peer& self, const Peer& peer, const NodeId& destination) const {
  if (!contains(destination) || destination == self.id) return false;
  if (peer.id == destination) return true;
  switch (self.role) {
    case NodeRole::Rural:
    case NodeRole::Urban:
      return peer.role == NodeRole::Mule;
    case NodeRole::Mule:
      return false;
  }
  return false;
}

RoleGraph RoleGraph::parse(std::string_view spec) {
  RoleGraph g;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto comma = spec.find(',', pos);
    auto item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? spec.size() : comma + 1;
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    auto colon = item.rfind(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::InvalidConfig, "peer entry '" + std::string(item) + "' is not id:role");
    auto role = parse_role(item.substr(colon + 1));
    if (!role) throw Error(Errc::InvalidConfig, "unknown role in peer entry '" + std::string(item) + "'");
    g.add(NodeId(std::string(item.substr(0, colon))), *role);
  }
  return g;
}

std::string RoleGraph::to_spec() const {
  std::string out;
  for (const auto& [id, role] : nodes_) {
    if (!out.empty()) out += ',';
    out += id.str() + ":" + to_string(role);
  }
  return out;
}

bool should_offer(const BundleMeta& bundle, const Peer& self, const Peer& peer, const RoleGraph& graph,
                  bool from_peer_this_session) {
  if (from_peer_this_session) return false;
  if (!graph.contains(bundle.destination)) {
    log::warn("routing: unknown destination " + bundle.destination.str() + " for bundle " +
              to_hex(bundle.id) + "; retaining until TTL");
    return false;
  }
  return graph.is_next_hop(self, peer, bundle.destination);
}

const char* to_string(OfferDecision d) {
  switch (d) {
    case OfferDecision::Accept: return "Accept";
    case OfferDecision::RejectDuplicate: return "RejectDuplicate";
    case OfferDecision::RejectQuota: return "RejectQuota";
  }
  return "?";
}

OfferDecision accept_offer(const BundleMeta& bundle, NodeRole /*self_role*/, std::uint64_t free_quota,
                           bool already_complete) {
  // Offers are filtered by the sender's routing; every role takes what it is
  // offered, subject to duplicates and space.
  if (already_complete) return OfferDecision::RejectDuplicate;
  if (bundle.total_len > free_quota) return OfferDecision::RejectQuota;
  return OfferDecision::Accept;
}

}  // namespace dtnl::routing
