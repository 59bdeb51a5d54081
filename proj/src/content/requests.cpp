// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/requests.hpp"

#include <algorithm>
#include <json.hpp>

#include "dtnl/common/digest.hpp"
#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl::content {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(RequestStatus s) {
  switch (s) {
    case RequestStatus::PendingPickup: return "PendingPickup";
    case RequestStatus::InTransit: return "InTransit";
    case RequestStatus::AtGateway: return "AtGateway";
    case RequestStatus::Fulfilled: return "Fulfilled";
    case RequestStatus::Failed: return "Failed";
  }
  return "?";
}

RequestStatus parse_status(std::string_view s) {
  for (auto st : {RequestStatus::PendingPickup, RequestStatus::InTransit, RequestStatus::AtGateway,
                  RequestStatus::Fulfilled, RequestStatus::Failed})
    if (s == to_string(st)) return st;
  throw Error(Errc::InvalidArgument, "unknown request status '" + std::string(s) + "'");
}

std::string request_id_of(const std::string& topic, const NodeId& requester, Millis created_at) {
  ByteWriter w;
  w.str16(topic);
  w.str16(requester.str());
  w.i64(created_at);
  return to_hex(sha256(w.bytes()));
}

RequestTable::RequestTable(fs::path root, bool sync) : root_(std::move(root)), sync_(sync) {
  if (root_.empty()) return;
  fs::create_directories(root_);
  load();
}

namespace {

json to_json(const TopicRequest& r) {
  json hist = json::array();
  for (const auto& [st, t] : r.history) hist.push_back({to_string(st), t});
  json j = {{"request_id", r.request_id}, {"topic", r.topic},          {"requester", r.requester.str()},
            {"status", to_string(r.status)}, {"created_at", r.created_at}, {"history", hist}};
  if (!r.fail_reason.empty()) j["reason"] = r.fail_reason;
  if (r.resolved_at) j["resolved_at"] = *r.resolved_at;
  if (r.bundle_id) j["bundle_id"] = to_hex(*r.bundle_id);
  return j;
}

TopicRequest from_json(const json& j) {
  TopicRequest r;
  r.request_id = j.at("request_id").get<std::string>();
  r.topic = j.at("topic").get<std::string>();
  r.requester = NodeId(j.at("requester").get<std::string>());
  r.status = parse_status(j.at("status").get<std::string>());
  r.created_at = j.at("created_at").get<Millis>();
  if (j.contains("reason")) r.fail_reason = j["reason"].get<std::string>();
  if (j.contains("resolved_at")) r.resolved_at = j["resolved_at"].get<Millis>();
  if (j.contains("bundle_id")) r.bundle_id = bundle_id_from_hex(j["bundle_id"].get<std::string>());
  for (const auto& h : j.at("history")) r.history.emplace_back(parse_status(h.at(0).get<std::string>()), h.at(1).get<Millis>());
  return r;
}

}  // namespace

void RequestTable::load() {
  for (const auto& line : read_lines(root_ / "requests.jsonl")) {
    try {
      auto r = from_json(json::parse(line));
      rows_[r.request_id] = std::move(r);
    } catch (const std::exception& e) {
      log::warn(std::string("requests: skipping bad line: ") + e.what());
    }
  }
}

void RequestTable::persist(const TopicRequest& r) {
  if (!root_.empty()) append_line(root_ / "requests.jsonl", to_json(r).dump(), sync_);
}

const TopicRequest& RequestTable::insert(TopicRequest r) {
  if (r.history.empty()) r.history.emplace_back(r.status, r.created_at);
  persist(r);
  auto id = r.request_id;
  return rows_[id] = std::move(r);
}

bool RequestTable::advance(const std::string& id, RequestStatus to, Millis now, const std::string& reason) {
  auto it = rows_.find(id);
  if (it == rows_.end()) return false;
  auto& r = it->second;
  if (terminal(r.status) || static_cast<int>(to) <= static_cast<int>(r.status)) return false;
  // Failed may be entered from any open state; the others pass through
  // every intermediate state so the history stays a prefix of the chain.
  if (to != RequestStatus::Failed) {
    for (int s = static_cast<int>(r.status) + 1; s < static_cast<int>(to); ++s)
      r.history.emplace_back(static_cast<RequestStatus>(s), now);
  }
  r.status = to;
  r.history.emplace_back(to, now);
  if (terminal(to)) r.resolved_at = now;
  if (to == RequestStatus::Failed) r.fail_reason = reason;
  persist(r);
  return true;
}

const TopicRequest* RequestTable::find(const std::string& id) const {
  auto it = rows_.find(id);
  return it == rows_.end() ? nullptr : &it->second;
}

const TopicRequest* RequestTable::find_open(const std::string& topic, const NodeId& requester) const {
  for (const auto& [id, r] : rows_)
    if (!terminal(r.status) && r.topic == topic && r.requester == requester) return &r;
  return nullptr;
}

const TopicRequest* RequestTable::find_by_bundle(const BundleId& bid) const {
  for (const auto& [id, r] : rows_)
    if (r.bundle_id && *r.bundle_id == bid) return &r;
  return nullptr;
}

std::vector<const TopicRequest*> RequestTable::list() const {
  std::vector<const TopicRequest*> out;
  for (const auto& [id, r] : rows_) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const TopicRequest* a, const TopicRequest* b) {
    return std::tie(a->created_at, a->request_id) < std::tie(b->created_at, b->request_id);
  });
  return out;
}

}  // namespace dtnl::content
