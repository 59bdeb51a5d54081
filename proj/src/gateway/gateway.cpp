// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/gateway/gateway.hpp"

#include <algorithm>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "Queued";
    case JobState::Fetching: return "Fetching";
    case JobState::Done: return "Done";
    case JobState::Error: return "Error";
  }
  return "?";
}

namespace {

JobState parse_job_state(const std::string& s) {
  for (auto st : {JobState::Queued, JobState::Fetching, JobState::Done, JobState::Error})
    if (s == to_string(st)) return st;
  throw Error(Errc::InvalidArgument, "unknown job state " + s);
}

Bundle response_bundle(const FetchJob& job, const GatewayOptions& options, content::ContentResponseMsg msg) {
  msg.request_id = job.request_id;
  msg.topic = job.topic;
  return create_bundle(options.self, job.requester, BundleKind::ContentResponse, Priority::Content,
                       content::serialize(msg), options.response_ttl, job.fetch_started_at);
}

content::ContentResponseMsg error_msg(const std::string& reason) {
  content::ContentResponseMsg m;
  m.ok = false;
  m.reason = reason;
  return m;
}

json job_to_json(const FetchJob& j) {
  json o = {{"request_id", j.request_id},   {"topic", j.topic},
            {"requester", j.requester.str()}, {"state", to_string(j.state)},
            {"attempts", j.attempts},         {"enqueued_at", j.enqueued_at},
            {"next_attempt_at", j.next_attempt_at}, {"fetch_started_at", j.fetch_started_at}};
  if (!j.error_reason.empty()) o["reason"] = j.error_reason;
  if (j.response) o["response"] = to_hex(*j.response);
  return o;
}

FetchJob job_from_json(const json& o) {
  FetchJob j;
  j.request_id = o.at("request_id").get<std::string>();
  j.topic = o.at("topic").get<std::string>();
  j.requester = NodeId(o.at("requester").get<std::string>());
  j.state = parse_job_state(o.at("state").get<std::string>());
  j.attempts = o.at("attempts").get<std::uint8_t>();
  j.enqueued_at = o.at("enqueued_at").get<Millis>();
  j.next_attempt_at = o.at("next_attempt_at").get<Millis>();
  j.fetch_started_at = o.at("fetch_started_at").get<Millis>();
  if (o.contains("reason")) j.error_reason = o["reason"].get<std::string>();
  if (o.contains("response")) j.response = bundle_id_from_hex(o["response"].get<std::string>());
  return j;
}

}  // namespace

JobStep process_job(const FetchJob& in, ArticleSource& source, const GatewayOptions& options, Millis now) {
  if (in.state == JobState::Done || (in.state == JobState::Error && in.attempts > options.max_retries))
    throw Error(Errc::InvalidArgument, "job " + in.request_id + " has nothing left to do");
  JobStep step{in, std::nullopt};
  auto& job = step.job;
  if (job.state != JobState::Fetching) job.fetch_started_at = now;
  job.state = JobState::Fetching;

  auto finish = [&](JobState state, std::string reason, content::ContentResponseMsg msg) {
    job.state = state;
    job.error_reason = std::move(reason);
    step.bundle = response_bundle(job, options, std::move(msg));
    job.response = step.bundle->header.id;
  };

  auto result = source.lookup(job.topic);
  switch (result.kind) {
    case LookupResult::Kind::Found: {
      try {
        auto article = normalize_article(result.title, result.body);
        content::ContentResponseMsg m;
        m.title = std::move(article.title);
        m.body = std::move(article.body);
        m.updated_at = job.fetch_started_at;
        finish(JobState::Done, {}, std::move(m));
      } catch (const Error& e) {
        if (e.code() != Errc::EmptyAfterNormalization) throw;
        finish(JobState::Error, "empty_article", error_msg("empty_article"));
      }
      break;
    }
    case LookupResult::Kind::NotFound:
      finish(JobState::Error, "not_found", error_msg("not_found"));
      break;
    case LookupResult::Kind::TransientError:
      if (job.attempts >= options.max_retries) {
        finish(JobState::Error, "unreachable", error_msg("unreachable"));
        break;
      }
      job.next_attempt_at = now + options.base_backoff * (Millis{1} << job.attempts);
      ++job.attempts;
      job.state = JobState::Queued;
      job.error_reason = result.message;
      break;
  }
  return step;
}

FetchGateway::FetchGateway(GatewayOptions options, ArticleSource& source)
    : options_(std::move(options)), source_(source) {
  if (options_.root.empty()) return;
  fs::create_directories(options_.root);
  std::map<std::string, std::size_t> index;
  for (const auto& line : read_lines(options_.root / "jobs.jsonl")) {
    try {
      auto job = job_from_json(json::parse(line));
      auto it = index.find(job.request_id);
      if (it == index.end()) {
        index[job.request_id] = jobs_.size();
        jobs_.push_back(std::move(job));
      } else {
        jobs_[it->second] = std::move(job);
      }
    } catch (const std::exception& e) {
      log::warn(std::string("gateway: skipping bad job line: ") + e.what());
    }
  }
}

void FetchGateway::persist(const FetchJob& job) {
  if (!options_.root.empty()) append_line(options_.root / "jobs.jsonl", job_to_json(job).dump(), options_.sync);
}

bool FetchGateway::enqueue(const content::FetchOrder& order, Millis now) {
  for (const auto& j : jobs_)
    if (j.request_id == order.request_id) return false;
  FetchJob job;
  job.request_id = order.request_id;
  job.topic = order.topic;
  job.requester = order.requester;
  job.enqueued_at = now;
  job.next_attempt_at = now;
  persist(job);
  jobs_.push_back(std::move(job));
  return true;
}

std::size_t FetchGateway::poll(Millis now, const std::function<void(const Bundle&)>& emit) {
  std::size_t out = 0;
  for (auto& job : jobs_) {
    const bool due = job.state == JobState::Fetching || (job.state == JobState::Queued && job.next_attempt_at <= now);
    if (!due) continue;
    if (job.state == JobState::Queued) {
      // Record the start first so a crash mid-fetch replays the same stamp.
      job.state = JobState::Fetching;
      job.fetch_started_at = now;
      persist(job);
    }
    auto step = process_job(job, source_, options_, now);
    job = std::move(step.job);
    // The response is handed off before the job is recorded as finished.
    if (step.bundle) {
      emit(*step.bundle);
      ++out;
    }
    persist(job);
  }
  return out;
}

std::optional<Millis> FetchGateway::next_due() const {
  std::optional<Millis> best;
  for (const auto& j : jobs_) {
    if (j.state == JobState::Fetching) return j.fetch_started_at;
    if (j.state == JobState::Queued) best = std::min(best.value_or(j.next_attempt_at), j.next_attempt_at);
  }
  return best;
}

std::size_t FetchGateway::pending() const {
  return static_cast<std::size_t>(std::count_if(jobs_.begin(), jobs_.end(), [](const FetchJob& j) {
    return j.state == JobState::Queued || j.state == JobState::Fetching;
  }));
}

json FetchGateway::jobs_json() const {
  json arr = json::array();
  for (const auto& j : jobs_) arr.push_back(job_to_json(j));
  return arr;
}

}  // namespace dtnl::gateway
