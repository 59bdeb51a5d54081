// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtnl/bundle/bundle.hpp"
#include "dtnl/content/service.hpp"
#include "dtnl/gateway/source.hpp"

namespace dtnl::gateway {

struct NormalizedArticle {
  std::string title;
  std::string body;
};

/// Trims the title; strips markup tags (and script/style contents) from the
/// body, decodes character references, normalizes line endings and trims.
/// Throws EmptyAfterNormalization.
NormalizedArticle normalize_article(const std::string& raw_title, const std::string& raw_body);

enum class JobState { Queued, Fetching, Done, Error };

const char* to_string(JobState s);

struct FetchJob {
  std::string request_id;
  std::string topic;
  NodeId requester;
  JobState state = JobState::Queued;
  std::uint8_t attempts = 0;  // transient failures so far
  Millis enqueued_at = 0;
  Millis next_attempt_at = 0;
  /// Start of the current fetch; stamps the response so a replay after a
  /// crash produces the same bundle id.
  Millis fetch_started_at = 0;
  std::string error_reason;
  std::optional<BundleId> response;
};

struct GatewayOptions {
  NodeId self;
  int max_retries = 3;
  Millis base_backoff = kMinute;
  Millis response_ttl = kDefaultBundleTtl;
  /// jobs.jsonl lives here; empty keeps jobs in memory.
  std::filesystem::path root;
  bool sync = true;
};

struct JobStep {
  FetchJob job;
  std::optional<Bundle> bundle;
};

/// One attempt at a job. Success or NotFound ends it with a response bundle;
/// a transient error re-queues it with backoff base * 2^attempts until
/// max_retries is used up, then ends it with an "unreachable" response.
JobStep process_job(const FetchJob& job, ArticleSource& source, const GatewayOptions& options, Millis now);

/// Sequential job runner at an urban node.
class FetchGateway {
 public:
  FetchGateway(GatewayOptions options, ArticleSource& source);

  /// Queues a job unless one exists for the same request id.
  bool enqueue(const content::FetchOrder& order, Millis now);
  /// Runs every due job in arrival order, passing each response bundle to
  /// `emit` (which must make it durable). Returns the number emitted.
  std::size_t poll(Millis now, const std::function<void(const Bundle&)>& emit);
  /// Earliest time a queued job becomes due.
  std::optional<Millis> next_due() const;

  const std::vector<FetchJob>& jobs() const { return jobs_; }
  std::size_t pending() const;
  nlohmann::json jobs_json() const;

 private:
  void persist(const FetchJob& job);

  GatewayOptions options_;
  ArticleSource& source_;
  std::vector<FetchJob> jobs_;  // arrival order
};

}  // namespace dtnl::gateway
