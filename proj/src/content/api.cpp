// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/api.hpp"

#include <charconv>

#include "dtnl/common/error.hpp"

namespace dtnl::content {

using nlohmann::json;

json to_json(const TopicRequest& r) {
  json hist = json::array();
  for (const auto& [st, t] : r.history) hist.push_back({{"status", to_string(st)}, {"at", t}});
  json j = {{"request_id", r.request_id}, {"topic", r.topic},          {"requester", r.requester.str()},
            {"status", to_string(r.status)}, {"created_at", r.created_at}, {"history", hist}};
  j["resolved_at"] = r.resolved_at ? json(*r.resolved_at) : json(nullptr);
  if (r.status == RequestStatus::Failed) j["reason"] = r.fail_reason;
  return j;
}

json to_json(const ContentItem& item) {
  return {{"content_id", to_hex(item.content_id)}, {"title", item.title},
          {"version", item.version},               {"origin", to_string(item.origin)},
          {"updated_at", item.updated_at},         {"body", item.body}};
}

json to_json(const CatalogSummary& s) {
  return {{"title", s.title}, {"version", s.version}, {"origin", to_string(s.origin)}, {"updated_at", s.updated_at}};
}

namespace {

ApiResponse reply(int status, const json& j) { return {status, j.dump()}; }

ApiResponse error(int status, const std::string& code, const std::string& message) {
  return reply(status, {{"error", code}, {"message", message}});
}

int status_for(Errc c) {
  switch (c) {
    case Errc::EmptyTitle:
    case Errc::EmptyTopic:
    case Errc::InvalidArgument:
    case Errc::OversizePayload:
    case Errc::EmptyPayload: return 400;
    case Errc::NotFound: return 404;
    case Errc::InvalidConfig: return 409;
    case Errc::StorageFull: return 507;
    default: return 500;
  }
}

json parse_body(const std::string& body) {
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::InvalidArgument, "request body must be a JSON object");
  return j;
}

std::string string_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string())
    throw Error(Errc::InvalidArgument, std::string("field '") + name + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Api::Api(ContentService* service, Hooks hooks) : service_(service), hooks_(std::move(hooks)) {
  if (!hooks_.clock) hooks_.clock = wall_clock_ms;
}

ApiResponse Api::handle(const ApiRequest& req) {
  try {
    return route(req);
  } catch (const Error& e) {
    return error(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error(500, "Internal", e.what());
  }
}

ApiResponse Api::route(const ApiRequest& req) {
  const std::string content_prefix = "/api/content/";
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";

  if (req.path == "/api/node/status") {
    if (!get) return error(405, "MethodNotAllowed", "use GET");
    return reply(200, hooks_.node_status ? hooks_.node_status() : json::object());
  }
  if (req.path == "/api/gateway/jobs") {
    if (!get) return error(405, "MethodNotAllowed", "use GET");
    if (!hooks_.gateway_jobs) return error(409, "UnsupportedRole", "this node runs no fetch gateway");
    return reply(200, hooks_.gateway_jobs());
  }

  const bool content_path = req.path == "/api/content" || req.path.rfind(content_prefix, 0) == 0;
  const bool request_path = req.path == "/api/requests" || req.path.rfind("/api/requests/", 0) == 0;
  if (!content_path && !request_path) return error(404, "NotFound", "no route for " + req.path);
  if (!service_) return error(409, "UnsupportedRole", "this node has no content service");

  if (req.path == "/api/content") {
    if (get) {
      auto q = req.query.find("q");
      json arr = json::array();
      for (const auto& s : service_->catalog().list(q == req.query.end() ? "" : q->second)) arr.push_back(to_json(s));
      return reply(200, arr);
    }
    if (post) {
      auto j = parse_body(req.body);
      const auto& item = service_->publish(string_field(j, "title"), string_field(j, "body"), hooks_.clock());
      return reply(201, to_json(item));
    }
    return error(405, "MethodNotAllowed", "use GET or POST");
  }
  if (content_path) {
    if (!get) return error(405, "MethodNotAllowed", "use GET");
    const auto title = req.path.substr(content_prefix.size());
    std::optional<std::uint32_t> version;
    if (auto v = req.query.find("version"); v != req.query.end()) {
      std::uint32_t n = 0;
      auto [p, ec] = std::from_chars(v->second.data(), v->second.data() + v->second.size(), n);
      if (ec != std::errc{} || p != v->second.data() + v->second.size() || n == 0)
        return error(400, "InvalidArgument", "version must be a positive integer");
      version = n;
    }
    return reply(200, to_json(service_->catalog().get(title, version)));
  }

  if (req.path == "/api/requests") {
    if (get) {
      json arr = json::array();
      for (const auto* r : service_->requests().list()) arr.push_back(to_json(*r));
      return reply(200, arr);
    }
    if (post) {
      auto j = parse_body(req.body);
      const auto before = service_->requests().size();
      const auto& r = service_->request_topic(string_field(j, "topic"), hooks_.clock());
      return reply(service_->requests().size() > before ? 201 : 200, to_json(r));
    }
    return error(405, "MethodNotAllowed", "use GET or POST");
  }
  if (!get) return error(405, "MethodNotAllowed", "use GET");
  const auto id = req.path.substr(std::string("/api/requests/").size());
  const auto* r = service_->requests().find(id);
  if (!r) return error(404, "NotFound", "no request " + id);
  return reply(200, to_json(*r));
}

}  // namespace dtnl::content
