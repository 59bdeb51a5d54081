// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "dtnl/bundle/bundle.hpp"
#include "dtnl/bundle/range_set.hpp"

namespace dtnl::proto {

/// A complete local bundle that may be offered in a contact.
struct OfferItem {
  BundleId id{};
  std::uint64_t total_len = 0;  // image length
  NodeId source;
  NodeId destination;
  BundleKind kind = BundleKind::ContentUpdate;
  Priority priority = Priority::Content;
  Millis created_at = 0;

  bool operator==(const OfferItem&) const = default;
};

/// What the peer reported holding for one bundle.
struct PeerHolding {
  BundleId id{};
  bool complete = false;
  RangeSet ranges;
};

struct PlanEntry {
  BundleId id{};
  std::uint64_t start_offset = 0;
  std::uint64_t total_len = 0;

  bool operator==(const PlanEntry&) const = default;
};

using TransferPlan = std::vector<PlanEntry>;
using RoutingFilter = std::function<bool(const OfferItem&)>;

/// Orders what to send: `local_offers` order is kept (it is the offer queue
/// order), bundles the peer holds complete are skipped, and partially held
/// ones resume at the end of the peer's longest stored prefix.
TransferPlan plan_transfer(const std::vector<OfferItem>& local_offers,
                           const std::vector<PeerHolding>& peer_manifest, const RoutingFilter& routing_filter);

}  // namespace dtnl::proto
