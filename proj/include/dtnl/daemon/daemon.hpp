// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <shared_mutex>

#include "dtnl/daemon/config.hpp"

namespace dtnl::daemon {

/// Async-signal-safe requests for every running daemon in the process.
void signal_stop();
void signal_toggle_range();

/// A node over real sockets. Mules send UDP BEACON frames to their targets
/// while in range and accept one TCP session at a time; rural and urban
/// nodes listen for beacons and connect back to the beacon's source address.
/// One protocol thread (run()) plus the HTTP API thread, which share the node
/// through a reader/writer lock.
class Daemon {
 public:
  /// Opens the store and services and replays pending deliveries.
  explicit Daemon(NodeConfig config);
  ~Daemon();
  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  /// Binds the beacon/session sockets and the API. Throws
  /// Error(BindFailure).
  void start();
  /// Protocol loop; returns after signal_stop() or stop().
  void run();
  void stop();

  int listen_port() const;
  int api_port() const;
  bool in_range() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dtnl::daemon
