// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnl/bundle/bundle.hpp"

namespace dtnl::sim {

/// Contact duration model. Fixed when min == max.
struct DurationDist {
  Millis min = 5 * kSecond;
  Millis max = 30 * kSecond;

  static DurationDist fixed(Millis d) { return {d, d}; }
  static DurationDist uniform(Millis lo, Millis hi) { return {lo, hi}; }
  bool is_fixed() const { return min == max; }
  bool operator==(const DurationDist&) const = default;
};

/// A node on the mule route, visited once per cycle at `phase`.
struct Stop {
  NodeId node;
  NodeRole role = NodeRole::Rural;
  Millis phase = 0;
  bool operator==(const Stop&) const = default;
};

struct WorkloadEvent {
  enum class Kind { Request, Publish };
  Kind kind = Kind::Request;
  Millis at = 0;
  NodeId node;
  /// Topic (request) or title (publish).
  std::string topic;
  /// Article size served for a request topic, or the published body size.
  /// Unset for a request means the corpus size range applies.
  std::optional<std::uint64_t> size;
  bool operator==(const WorkloadEvent&) const = default;
};

/// Requests spread uniformly over [from, to) at one node; expanded into the
/// workload by expand_workload().
struct RandomRequests {
  std::uint32_t count = 0;
  NodeId node;
  Millis from = 0;
  Millis to = 0;
  bool operator==(const RandomRequests&) const = default;
};

struct SimConfig {
  std::string name = "unnamed";
  Millis cycle_period = 2400 * kSecond;
  std::vector<Stop> stops;
  DurationDist contact_duration;
  std::uint64_t link_rate_bps = 20'000'000;
  /// Protocol overhead in parts per million of the raw link budget.
  std::uint32_t overhead_ppm = 50'000;
  std::uint32_t mule_count = 1;
  std::uint64_t seed = 1;
  Millis duration = 48 * kHour;
  std::vector<WorkloadEvent> workload;
  std::optional<RandomRequests> random_requests;
  /// Size range of gateway articles for topics without an explicit size.
  std::uint64_t corpus_min_bytes = 10'000'000;
  std::uint64_t corpus_max_bytes = 30'000'000;
  std::uint64_t chunk_size = 64 * 1024;
  Millis bundle_ttl = kDefaultBundleTtl;

  bool operator==(const SimConfig&) const = default;
};

/// Throws InvalidConfig on a broken geometry or parameter; WorkloadError when
/// an event names an unknown node or the wrong role.
void validate(const SimConfig& config);

/// The first urban stop; requests are addressed to its gateway.
const Stop& gateway_stop(const SimConfig& config);
std::string mule_name(std::uint32_t index);

/// Explicit workload plus expanded random requests, sorted by time (stable).
std::vector<WorkloadEvent> expand_workload(const SimConfig& config);

/// Scenario JSON (times in seconds). Throws ScenarioInvalid.
SimConfig parse_scenario(const nlohmann::json& doc);
SimConfig load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const SimConfig& config);

/// Built-in scenario names ("campus-default").
std::optional<SimConfig> builtin_scenario(const std::string& name);
SimConfig campus_default();

/// Applies "key=value" to a config (sweep and CLI overrides). Throws
/// ScenarioInvalid for unknown keys.
void set_param(SimConfig& config, const std::string& key, const std::string& value);

}  // namespace dtnl::sim
