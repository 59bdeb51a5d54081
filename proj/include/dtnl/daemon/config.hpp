// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtnl/node/node.hpp"

namespace dtnl::daemon {

struct Endpoint {
  std::string host;
  int port = 0;
  bool operator==(const Endpoint&) const = default;
};

enum class CorpusBackend { Offline, Synthetic, Live };

/// Everything a node daemon needs. See docs/cli.md for the file format.
struct NodeConfig {
  NodeId node_id;
  NodeRole role = NodeRole::Rural;
  std::filesystem::path data_dir;
  std::uint64_t quota_bytes = kDefaultStoreQuota;
  std::uint64_t chunk_size = kDefaultChunkSize;
  bool fsync = true;

  /// TCP listen (mule) and UDP beacon receive (stops) share this port.
  std::string listen_host = "0.0.0.0";
  int listen_port = 4556;
  std::vector<Endpoint> beacon_targets;  // mule only
  Millis beacon_interval = 1 * kSecond;
  bool start_in_range = true;  // mule only; SIGUSR1 toggles
  /// Stops skip beacons from a mule for this long after a clean session.
  Millis recontact_holdoff = 10 * kSecond;
  /// Sender-side pacing for link emulation; 0 = unlimited.
  std::uint64_t link_rate_bps = 0;

  routing::RoleGraph peers;
  std::optional<NodeId> gateway;  // rural only
  std::vector<NodeId> sync_targets;

  CorpusBackend corpus_backend = CorpusBackend::Offline;  // urban only
  std::filesystem::path corpus_path;
  std::uint64_t synthetic_seed = 1;
  std::uint64_t synthetic_min_bytes = 10'000'000;
  std::uint64_t synthetic_max_bytes = 30'000'000;
  std::string live_url = "https://en.wikipedia.org";

  std::optional<Endpoint> api_bind;  // rural/urban; unset disables the API
  std::filesystem::path static_dir;

  proto::SessionTimers timers;
  Millis tick_interval = 250;
  Millis request_ttl = content::kDefaultRequestTtl;
  Millis bundle_ttl = kDefaultBundleTtl;
  int fetch_retries = 3;
  Millis fetch_backoff = kMinute;
  std::string log_level = "info";

  node::NodeOptions node_options() const;
};

/// key -> value after comments and blanks are dropped. Throws InvalidConfig
/// naming the line for malformed input.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Builds and validates a config from key/values. `env` entries named
/// DTLN_<KEY> (key upper-cased) override file values. Throws InvalidConfig
/// with a message that starts with the offending key.
NodeConfig make_config(std::map<std::string, std::string> values, const std::map<std::string, std::string>& env = {});

NodeConfig load_config(const std::filesystem::path& path, const std::map<std::string, std::string>& env);

/// DTLN_* variables of the current process.
std::map<std::string, std::string> process_env();

}  // namespace dtnl::daemon
