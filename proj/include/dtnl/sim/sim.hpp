// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnl/sim/config.hpp"
#include "dtnl/sim/plan.hpp"

namespace dtnl::sim {

/// Where a bundle ended up when the simulation stopped.
enum class Fate { Delivered, Expired, Custody, PartialInFlight, Violation };
const char* to_string(Fate f);

struct BundleRecord {
  BundleId id{};
  BundleKind kind = BundleKind::ContentUpdate;
  NodeId source;
  NodeId destination;
  std::uint64_t image_len = 0;
  Millis created_at = 0;
  std::optional<Millis> delivered_at;
  /// Chunk payload bytes received for this bundle over all hops.
  std::uint64_t chunk_bytes = 0;
  /// Nodes that received at least one chunk of it.
  std::uint32_t receivers = 0;
  /// Times the bundle became Complete at a node through a transfer.
  std::uint32_t hops = 0;
  /// Contacts that ended with this bundle partially received.
  std::uint32_t interrupted = 0;
  std::uint32_t deliveries = 0;
  Fate fate = Fate::Custody;
  std::uint32_t complete_copies = 0;
  std::uint32_t partial_copies = 0;
};

struct RequestRecord {
  std::string request_id;
  NodeId node;
  std::string topic;
  Millis created_at = 0;
  std::string status;
  std::optional<Millis> resolved_at;
  std::string fail_reason;

  std::optional<Millis> rtt() const {
    if (status == "Fulfilled" && resolved_at) return *resolved_at - created_at;
    return std::nullopt;
  }
};

struct ContactRecord {
  ContactWindow window;
  std::uint64_t frame_bytes = 0;
  /// CHUNK payload bytes delivered in both directions.
  std::uint64_t payload_bytes = 0;
  std::uint64_t handshake_bytes = 0;
  std::uint32_t bundles_completed = 0;
  std::uint32_t resumed = 0;
  bool aborted = false;
  bool budget_exhausted = false;

  /// Payload bytes per second of window.
  double goodput_Bps() const {
    return window.duration > 0 ? static_cast<double>(payload_bytes) * 1000.0 / static_cast<double>(window.duration)
                               : 0.0;
  }
};

struct FreshnessSample {
  Millis at = 0;
  NodeId node;
  /// now − newest updated_at in the catalog.
  Millis age = 0;
};

struct SimMetrics {
  std::vector<BundleRecord> bundles;    // by (created_at, id)
  std::vector<RequestRecord> requests;  // by (created_at, request_id)
  std::vector<ContactRecord> contacts;  // plan order
  std::vector<FreshnessSample> freshness;
  std::uint64_t aborted_sessions = 0;
  std::uint64_t resumed_transfers = 0;
  std::uint64_t conservation_violations = 0;
  std::uint64_t duplicate_deliveries = 0;
  /// Partial copies left behind for bundles that were already delivered.
  std::uint64_t stale_partials = 0;
  /// Largest HELLO+MANIFEST+WANT byte count seen in any contact.
  std::uint64_t max_handshake_bytes = 0;
};

struct NodeSnapshot {
  NodeId id;
  NodeRole role = NodeRole::Rural;
  std::vector<BundleId> complete;
  std::vector<BundleId> partial;
  std::vector<std::string> catalog_titles;
};

struct SimResult {
  SimConfig config;
  SimMetrics metrics;
  std::vector<NodeSnapshot> nodes;
};

struct RunOptions {
  /// Node stores live here. Empty means a fresh temporary directory that is
  /// removed afterwards.
  std::filesystem::path work_dir;
};

/// Runs the scenario on real node stacks over a virtual clock. Pure function
/// of the config. Throws InvalidConfig or WorkloadError.
SimResult run_sim(const SimConfig& config, const RunOptions& options = {});

/// Exact round trip for a request created at `request_time` at `rural`
/// (first rural stop by default). Requires fixed durations and per-window
/// capacity for every workload payload; throws AssumptionViolated otherwise.
struct RttBounds {
  Millis pickup = 0;
  Millis at_urban = 0;
  Millis response_pickup = 0;
  Millis fulfilled = 0;
  Millis min_rtt = 0;
  Millis max_rtt = 0;
};
RttBounds analytic_bounds(const SimConfig& config, Millis request_time, std::optional<NodeId> rural = std::nullopt);

/// Summary numbers for the CLI table and summary.json.
struct Summary {
  std::size_t requests = 0;
  std::size_t fulfilled = 0;
  std::size_t failed = 0;
  std::optional<double> mean_rtt_s;
  std::optional<double> median_rtt_s;
  std::size_t bundles = 0;
  std::size_t delivered = 0;
  std::optional<double> mean_freshness_s;
  std::uint64_t chunk_payload_bytes = 0;
};
Summary summarize(const SimResult& result);

nlohmann::json summary_json(const SimResult& result);
std::string bundles_csv(const SimMetrics& m);
std::string requests_csv(const SimMetrics& m);
std::string contacts_csv(const SimMetrics& m);
std::string freshness_csv(const SimMetrics& m);
/// Writes bundles.csv, requests.csv, contacts.csv, freshness.csv and
/// summary.json into `dir` (created if needed).
void write_outputs(const SimResult& result, const std::filesystem::path& dir);
/// Human-readable summary table.
std::string format_summary(const SimResult& result);
/// Same table from a summary.json document. Throws nlohmann::json errors on
/// missing keys.
std::string format_summary(const nlohmann::json& summary);

}  // namespace dtnl::sim
