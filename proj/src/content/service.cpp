// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/service.hpp"

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/log.hpp"
#include "dtnl/common/text.hpp"

namespace dtnl::content {

namespace fs = std::filesystem;

namespace {

fs::path sub(const fs::path& root, const char* name) { return root.empty() ? fs::path{} : root / name; }

std::set<BundleId> load_ids(const fs::path& path) {
  std::set<BundleId> out;
  for (const auto& line : read_lines(path))
    if (auto id = bundle_id_from_hex(line)) out.insert(*id);
  return out;
}

}  // namespace

ContentService::ContentService(ServiceOptions options, BundleStore& store)
    : options_(std::move(options)),
      store_(store),
      catalog_(sub(options_.root, "catalog"), options_.sync),
      requests_(sub(options_.root, "requests"), options_.sync) {
  if (!options_.root.empty()) {
    applied_ = load_ids(options_.root / "applied.log");
    quarantine_ = load_ids(options_.root / "quarantine.log");
  }
}

const ContentItem& ContentService::publish(const std::string& raw_title, std::string body, Millis now) {
  const auto title = trim(raw_title);
  if (title.empty()) throw Error(Errc::EmptyTitle, "title is empty");
  if (!valid_utf8(title) || !valid_utf8(body)) throw Error(Errc::InvalidArgument, "content is not valid UTF-8");
  const auto& item = catalog_.add(title, std::move(body), Origin::LocalAuthor, now);
  for (const auto& target : options_.sync_targets) {
    ContentUpdateMsg m{item.title, item.version, item.body, item.origin, item.updated_at};
    auto bundle = create_bundle(options_.self, target, BundleKind::ContentUpdate, Priority::Content, serialize(m),
                                options_.content_ttl, now);
    store_.put(bundle, now);
    if (options_.on_bundle_created) options_.on_bundle_created(bundle.header, now);
  }
  return item;
}

const TopicRequest& ContentService::request_topic(const std::string& raw_topic, Millis now) {
  const auto topic = trim(raw_topic);
  if (topic.empty()) throw Error(Errc::EmptyTopic, "topic is empty");
  if (!valid_utf8(topic)) throw Error(Errc::InvalidArgument, "topic is not valid UTF-8");
  if (!options_.gateway) throw Error(Errc::InvalidConfig, "no gateway configured for topic requests");
  if (const auto* open = requests_.find_open(topic, options_.self)) return *open;

  TopicRequest r;
  r.request_id = request_id_of(topic, options_.self, now);
  r.topic = topic;
  r.requester = options_.self;
  r.created_at = now;
  auto bundle = create_bundle(options_.self, *options_.gateway, BundleKind::TopicRequest, Priority::Control,
                              serialize(TopicRequestMsg{r.request_id, topic}), options_.request_ttl, now);
  r.bundle_id = bundle.header.id;
  store_.put(bundle, now);
  if (options_.on_bundle_created) options_.on_bundle_created(bundle.header, now);
  return requests_.insert(std::move(r));
}

void ContentService::upsert(const std::string& title, const std::string& body, Origin origin, Millis updated_at,
                            std::optional<std::uint32_t> version) {
  // A crash between the catalog write and the applied-log write replays the
  // bundle; an identical latest version means it already landed.
  if (const auto* latest = catalog_.find(title);
      latest && latest->body == body && latest->origin == origin && latest->updated_at == updated_at)
    return;
  catalog_.add(title, body, origin, updated_at, version);
}

void ContentService::mark_applied(const BundleId& id) {
  applied_.insert(id);
  if (!options_.root.empty()) append_line(options_.root / "applied.log", to_hex(id), options_.sync);
}

ApplyResult ContentService::apply_incoming(const Bundle& bundle, Millis now) {
  const auto& id = bundle.header.id;
  ApplyResult result;
  if (quarantine_.count(id)) {
    result.status = ApplyStatus::Quarantined;
    return result;
  }
  if (applied_.count(id)) {
    result.status = ApplyStatus::AlreadyApplied;
    return result;
  }

  AppMessage msg;
  try {
    msg = parse_app_message(bundle.payload);
  } catch (const Error& e) {
    log::warn("content: quarantining bundle " + to_hex(id) + ": " + e.what());
    quarantine_.insert(id);
    if (!options_.root.empty()) append_line(options_.root / "quarantine.log", to_hex(id), options_.sync);
    result.status = ApplyStatus::Quarantined;
    return result;
  }

  result.status = ApplyStatus::Applied;
  if (const auto* req = std::get_if<TopicRequestMsg>(&msg)) {
    if (options_.role != NodeRole::Urban) {
      result.status = ApplyStatus::Ignored;
    } else {
      TopicRequest r;
      r.request_id = req->request_id;
      r.topic = req->topic;
      r.requester = bundle.header.source;
      r.created_at = bundle.header.created_at;
      r.status = RequestStatus::AtGateway;
      r.history = {{RequestStatus::AtGateway, now}};
      if (!requests_.find(r.request_id)) requests_.insert(std::move(r));
      result.fetch = FetchOrder{req->request_id, req->topic, bundle.header.source};
    }
  } else if (const auto* upd = std::get_if<ContentUpdateMsg>(&msg)) {
    upsert(upd->title, upd->body, upd->origin, upd->updated_at, upd->version);
  } else if (const auto* resp = std::get_if<ContentResponseMsg>(&msg)) {
    if (resp->ok) upsert(resp->title, resp->body, Origin::FetchedRemote, resp->updated_at, std::nullopt);
    if (requests_.find(resp->request_id)) {
      const bool moved = resp->ok ? requests_.advance(resp->request_id, RequestStatus::Fulfilled, now)
                                  : requests_.advance(resp->request_id, RequestStatus::Failed, now, resp->reason);
      if (moved) result.resolved_request = resp->request_id;
    } else {
      log::warn("content: response for unknown request " + resp->request_id);
    }
  }
  mark_applied(id);
  return result;
}

void ContentService::on_custody_released(const BundleId& id, Millis now) {
  if (const auto* r = requests_.find_by_bundle(id)) requests_.advance(r->request_id, RequestStatus::InTransit, now);
}

std::vector<std::string> ContentService::expire_requests(Millis now) {
  std::vector<std::string> ids;
  for (const auto* r : requests_.list())
    if (!terminal(r->status) && r->requester == options_.self && now >= r->created_at + options_.request_ttl)
      ids.push_back(r->request_id);
  for (const auto& id : ids) requests_.advance(id, RequestStatus::Failed, now, "expired");
  return ids;
}

}  // namespace dtnl::content
