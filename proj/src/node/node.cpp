// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/node/node.hpp"

#include "dtnl/common/error.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl::node {

using nlohmann::json;

namespace {

std::filesystem::path sub(const std::filesystem::path& root, const char* name) {
  return root.empty() ? std::filesystem::path{} : root / name;
}

}  // namespace

Node::Node(NodeOptions options, gateway::ArticleSource* source, NodeObserver* observer)
    : options_(std::move(options)),
      observer_(observer ? observer : &null_observer_),
      store_(BundleStore::open(options_.store)) {
  const auto role = options_.self.role;
  if (role == NodeRole::Mule) return;
  content::ServiceOptions so;
  so.self = options_.self.id;
  so.role = role;
  so.gateway = options_.gateway;
  so.sync_targets = options_.sync_targets;
  so.request_ttl = options_.request_ttl;
  so.content_ttl = options_.content_ttl;
  so.root = sub(options_.app_root, "content");
  so.sync = options_.sync;
  so.on_bundle_created = [this](const BundleHeader& h, Millis t) { observer_->bundle_created(h, t); };
  content_ = std::make_unique<content::ContentService>(so, store_);
  if (role == NodeRole::Urban) {
    if (!source) throw Error(Errc::InvalidConfig, "urban node needs an article source");
    gateway::GatewayOptions go;
    go.self = options_.self.id;
    go.max_retries = options_.max_retries;
    go.base_backoff = options_.base_backoff;
    go.response_ttl = options_.content_ttl;
    go.root = sub(options_.app_root, "gateway");
    go.sync = options_.sync;
    gateway_ = std::make_unique<gateway::FetchGateway>(go, *source);
  }
}

void Node::recover(Millis now) {
  std::vector<BundleId> mine;
  for (const auto& [id, e] : store_.entries())
    if (e.complete() && e.header->destination == options_.self.id) mine.push_back(id);
  for (const auto& id : mine) deliver(id, now);
}

proto::SessionEnv Node::session_env(bool initiator, Millis now) const {
  proto::SessionEnv env;
  env.self = options_.self;
  env.graph = &options_.graph;
  env.initiator = initiator;
  env.timers = options_.timers;
  env.chunk_size = store_.options().chunk_size;
  env.free_quota = store_.free_bytes();
  // Offers are filtered by TTL at contact start; a bundle expiring during a
  // contact may still finish transferring.
  for (const auto& id : store_.offer_queue(now)) {
    const auto& h = *store_.find(id)->header;
    env.offers.push_back({id, image_length(h), h.source, h.destination, h.kind, h.priority, h.created_at});
  }
  for (const auto& [id, e] : store_.entries()) {
    if (e.complete()) {
      env.complete_ids.insert(id);
    } else {
      env.partials.push_back({e.meta, e.received});
    }
  }
  for (const auto& [id, t] : store_.released()) env.complete_ids.insert(id);
  const BundleStore* store = &store_;
  env.read_image = [store](const BundleId& id, std::uint64_t off, std::uint64_t len) {
    return store->read_image(id, off, len);
  };
  return env;
}

bool Node::apply(const proto::Action& action, Millis now) {
  try {
    if (const auto* c = std::get_if<proto::StoreChunk>(&action)) {
      const auto* e = store_.find(c->meta.id);
      if (e && e->complete()) return true;
      if (!e) store_.begin_partial(c->meta, now);
      store_.write_chunk(c->meta.id, c->offset, c->data);
      return true;
    }
    if (const auto* c = std::get_if<proto::CompleteBundle>(&action)) {
      switch (store_.complete(c->id, now)) {
        case CompleteResult::VerificationFailed:
        case CompleteResult::Incomplete: return false;
        case CompleteResult::AlreadyComplete: return true;
        case CompleteResult::Completed: break;
      }
      observer_->bundle_completed(c->id, now);
      if (store_.find(c->id)->header->destination == options_.self.id) deliver(c->id, now);
      return true;
    }
    if (const auto* d = std::get_if<proto::DeleteAfterCustody>(&action)) {
      store_.release(d->id);
      if (content_) content_->on_custody_released(d->id, now);
      observer_->custody_released(d->id, now);
      return true;
    }
  } catch (const Error& e) {
    log::warn(std::string("node ") + options_.self.id.str() + ": " + describe(action) + " failed: " + e.what());
    return false;
  }
  return true;
}

void Node::deliver(const BundleId& id, Millis now) {
  auto bundle = store_.get(id);
  if (!bundle) return;
  if (content_) {
    const bool first = !content_->applied(id) && !content_->quarantined(id);
    auto result = content_->apply_incoming(*bundle, now);
    if (first) observer_->bundle_delivered(bundle->header, now);
    if (result.status == content::ApplyStatus::Applied &&
        (bundle->header.kind != BundleKind::TopicRequest))
      observer_->catalog_changed(now);
    if (result.fetch && gateway_) gateway_->enqueue(*result.fetch, now);
    if (result.resolved_request) {
      if (const auto* r = content_->requests().find(*result.resolved_request)) observer_->request_resolved(*r, now);
    }
  } else {
    observer_->bundle_delivered(bundle->header, now);
  }
  // Keep a tombstone so later copies are refused as duplicates. Quarantined
  // bundles stay in the store.
  if (!content_ || !content_->quarantined(id)) store_.release(id);
}

void Node::session_finished(const proto::SessionState& state, Millis now) {
  if (state.peer) peer_last_seen_[state.peer->id] = now;
}

void Node::emit(const Bundle& bundle, Millis now) {
  store_.put(bundle, now);
  observer_->bundle_created(bundle.header, now);
}

void Node::expire(Millis now) {
  store_.expire(now);
  if (content_) {
    for (const auto& id : content_->expire_requests(now))
      if (const auto* r = content_->requests().find(id)) observer_->request_resolved(*r, now);
  }
}

void Node::tick(Millis now) {
  expire(now);
  poll_gateway(now);
}

std::size_t Node::poll_gateway(Millis now) {
  if (!gateway_) return 0;
  return gateway_->poll(now, [&](const Bundle& b) { emit(b, now); });
}

std::optional<Millis> Node::next_gateway_due() const {
  return gateway_ ? gateway_->next_due() : std::nullopt;
}

const content::ContentItem& Node::publish(const std::string& title, std::string body, Millis now) {
  if (!content_) throw Error(Errc::InvalidConfig, "mules do not host content");
  const auto& item = content_->publish(title, std::move(body), now);
  observer_->catalog_changed(now);
  return item;
}

const content::TopicRequest& Node::request_topic(const std::string& topic, Millis now) {
  if (!content_) throw Error(Errc::InvalidConfig, "mules do not host content");
  return content_->request_topic(topic, now);
}

json Node::status_json() const {
  std::size_t complete = 0, partial = 0, outbound = 0;
  std::map<std::string, std::size_t> by_kind;
  for (const auto& [id, e] : store_.entries()) {
    if (!e.complete()) {
      ++partial;
      continue;
    }
    ++complete;
    if (e.header->destination != options_.self.id) {
      ++outbound;
      ++by_kind[to_string(e.header->kind)];
    }
  }
  json peers = json::object();
  for (const auto& [peer, t] : peer_last_seen_) peers[peer.str()] = t;
  json j = {{"node", options_.self.id.str()},
            {"role", to_string(options_.self.role)},
            {"peer_last_seen", peers},
            {"store",
             {{"used_bytes", store_.used_bytes()},
              {"quota_bytes", store_.quota()},
              {"complete_bundles", complete},
              {"partial_bundles", partial}}},
            {"pending", {{"outbound_bundles", outbound}, {"by_kind", by_kind}}}};
  if (content_) {
    std::size_t open = 0;
    for (const auto* r : content_->requests().list()) open += !content::terminal(r->status);
    j["requests_open"] = open;
    j["catalog_titles"] = content_->catalog().title_count();
  }
  if (gateway_) j["gateway"] = {{"pending_jobs", gateway_->pending()}, {"jobs_total", gateway_->jobs().size()}};
  return j;
}

}  // namespace dtnl::node
