// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "dtnl/content/service.hpp"

namespace dtnl::content {

struct ApiRequest {
  std::string method;
  std::string path;  // percent-decoded
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON text
};

/// Transport-independent router for the node's HTTP/JSON API. The caller
/// serializes access to the service (GETs may share a read lock).
class Api {
 public:
  struct Hooks {
    std::function<Millis()> clock;
    /// Body of GET /api/node/status.
    std::function<nlohmann::json()> node_status;
    /// Body of GET /api/gateway/jobs; unset on nodes without a gateway.
    std::function<nlohmann::json()> gateway_jobs;
  };

  /// `service` may be null (mules): content endpoints then answer 409.
  Api(ContentService* service, Hooks hooks);

  ApiResponse handle(const ApiRequest& req);

  static bool is_write(const ApiRequest& req) { return req.method == "POST"; }

 private:
  ApiResponse route(const ApiRequest& req);

  ContentService* service_;
  Hooks hooks_;
};

nlohmann::json to_json(const TopicRequest& r);
nlohmann::json to_json(const ContentItem& item);
nlohmann::json to_json(const CatalogSummary& s);

}  // namespace dtnl::content
