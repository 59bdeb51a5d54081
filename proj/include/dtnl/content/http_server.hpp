// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <thread>

#include "dtnl/content/api.hpp"

namespace dtnl::content {

/// Serves an Api over HTTP on a background thread. GETs take `owner` shared,
/// POSTs exclusively, so API writes are serialized with the node's own.
class HttpServer {
 public:
  HttpServer(Api& api, std::shared_mutex& owner, std::filesystem::path static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and starts serving. Returns false on
  /// bind failure.
  bool start(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace dtnl::content
