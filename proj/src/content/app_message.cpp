// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/app_message.hpp"

#include <json.hpp>

#include "dtnl/common/error.hpp"

namespace dtnl::content {

using nlohmann::json;

const char* to_string(Origin o) { return o == Origin::LocalAuthor ? "LocalAuthor" : "FetchedRemote"; }

Origin parse_origin(std::string_view s) {
  if (s == "LocalAuthor") return Origin::LocalAuthor;
  if (s == "FetchedRemote") return Origin::FetchedRemote;
  throw Error(Errc::MalformedPayload, "unknown origin '" + std::string(s) + "'");
}

namespace {

struct ToJson {
  json operator()(const TopicRequestMsg& m) const {
    return {{"type", "topic_request"}, {"schema", kSchemaVersion}, {"request_id", m.request_id}, {"topic", m.topic}};
  }
  json operator()(const ContentUpdateMsg& m) const {
    return {{"type", "content_update"}, {"schema", kSchemaVersion}, {"title", m.title},
            {"version", m.version},     {"body", m.body},             {"origin", to_string(m.origin)},
            {"updated_at", m.updated_at}};
  }
  json operator()(const ContentResponseMsg& m) const {
    json j = {{"type", "content_response"}, {"schema", kSchemaVersion}, {"request_id", m.request_id},
              {"topic", m.topic},           {"status", m.ok ? "ok" : "error"}};
    if (m.ok) {
      j["title"] = m.title;
      j["body"] = m.body;
      j["origin"] = to_string(Origin::FetchedRemote);
      j["updated_at"] = m.updated_at;
    } else {
      j["reason"] = m.reason;
    }
    return j;
  }
};

template <class T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(Errc::MalformedPayload, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::MalformedPayload, std::string("bad field '") + name + "'");
  }
}

}  // namespace

Bytes serialize(const AppMessage& m) {
  auto text = std::visit(ToJson{}, m).dump();
  return Bytes(text.begin(), text.end());
}

AppMessage parse_app_message(ByteView payload) {
  json j;
  try {
    j = json::parse(as_chars(payload));
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedPayload, std::string("payload is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::MalformedPayload, "payload is not a JSON object");
  if (field<int>(j, "schema") != kSchemaVersion) throw Error(Errc::MalformedPayload, "unsupported schema");
  const auto type = field<std::string>(j, "type");
  if (type == "topic_request") return TopicRequestMsg{field<std::string>(j, "request_id"), field<std::string>(j, "topic")};
  if (type == "content_update") {
    ContentUpdateMsg m;
    m.title = field<std::string>(j, "title");
    m.version = field<std::uint32_t>(j, "version");
    m.body = field<std::string>(j, "body");
    m.origin = parse_origin(field<std::string>(j, "origin"));
    m.updated_at = field<Millis>(j, "updated_at");
    if (m.title.empty() || m.version == 0) throw Error(Errc::MalformedPayload, "bad content_update");
    return m;
  }
  if (type == "content_response") {
    ContentResponseMsg m;
    m.request_id = field<std::string>(j, "request_id");
    m.topic = field<std::string>(j, "topic");
    const auto status = field<std::string>(j, "status");
    if (status == "ok") {
      m.title = field<std::string>(j, "title");
      m.body = field<std::string>(j, "body");
      m.updated_at = field<Millis>(j, "updated_at");
      if (m.title.empty()) throw Error(Errc::MalformedPayload, "empty title in content_response");
    } else if (status == "error") {
      m.ok = false;
      m.reason = field<std::string>(j, "reason");
    } else {
      throw Error(Errc::MalformedPayload, "unknown status '" + status + "'");
    }
    return m;
  }
  throw Error(Errc::MalformedPayload, "unknown message type '" + type + "'");
}

}  // namespace dtnl::content
