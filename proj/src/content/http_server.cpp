// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/http_server.hpp"

#include <httplib.h>

#include <mutex>

namespace dtnl::content {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Api& api, std::shared_mutex& owner, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto handler = [&api, &owner](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    ApiResponse out;
    if (Api::is_write(r)) {
      std::unique_lock lock(owner);
      out = api.handle(r);
    } else {
      std::shared_lock lock(owner);
      out = api.handle(r);
    }
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  const std::string pattern = R"(/api/.*)";
  impl_->server.Get(pattern, handler);
  impl_->server.Post(pattern, handler);
  impl_->server.Put(pattern, handler);
  impl_->server.Delete(pattern, handler);
  if (!static_dir.empty()) impl_->server.set_mount_point("/", static_dir.string());
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) return false;
  } else {
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

void HttpServer::stop() {
  if (thread_.joinable()) {
    impl_->server.stop();
    thread_.join();
  }
}

}  // namespace dtnl::content
