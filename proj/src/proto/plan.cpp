// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/proto/plan.hpp"

#include <map>

namespace dtnl::proto {

TransferPlan plan_transfer(const std::vector<OfferItem>& local_offers,
                           const std::vector<PeerHolding>& peer_manifest, const RoutingFilter& routing_filter) {
  std::map<BundleId, const PeerHolding*> held;
  for (const auto& h : peer_manifest) held[h.id] = &h;

  TransferPlan plan;
  for (const auto& offer : local_offers) {
    if (routing_filter && !routing_filter(offer)) continue;
    std::uint64_t start = 0;
    if (auto it = held.find(offer.id); it != held.end()) {
      if (it->second->complete) continue;
      start = std::min(it->second->ranges.prefix_end(), offer.total_len);
      if (start == offer.total_len) continue;
    }
    plan.push_back({offer.id, start, offer.total_len});
  }
  return plan;
}

}  // namespace dtnl::proto
