// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/sim/sim.hpp"

#include <stdlib.h>

#include <algorithm>
#include <limits>
#include <memory>
#include <set>

#include <fmt/format.h>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/gateway/source.hpp"
#include "dtnl/node/node.hpp"
#include "dtnl/proto/pipe.hpp"

namespace dtnl::sim {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Fate f) {
  switch (f) {
    case Fate::Delivered: return "delivered";
    case Fate::Expired: return "expired";
    case Fate::Custody: return "custody";
    case Fate::PartialInFlight: return "partial";
    case Fate::Violation: return "violation";
  }
  return "?";
}

namespace {

constexpr Millis kNever = std::numeric_limits<Millis>::max();

std::uint64_t text_seed(std::uint64_t seed, const std::string& text) {
  const auto d = sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x = (x << 8) | d[static_cast<std::size_t>(i)];
  return x ^ seed;
}

/// Articles for the gateway: explicit sizes from the workload, otherwise the
/// corpus range. Bodies are a pure function of (seed, topic).
class SimCorpus : public gateway::ArticleSource {
 public:
  SimCorpus(const SimConfig& c, const std::vector<WorkloadEvent>& workload)
      : seed_(c.seed), fallback_(c.seed, c.corpus_min_bytes, c.corpus_max_bytes) {
    for (const auto& e : workload)
      if (e.kind == WorkloadEvent::Kind::Request && e.size) sizes_[e.topic] = *e.size;
  }

  gateway::LookupResult lookup(const std::string& topic) override {
    auto it = sizes_.find(topic);
    if (it == sizes_.end()) return fallback_.lookup(topic);
    return gateway::LookupResult::found(topic, gateway::synthetic_article(topic, it->second, text_seed(seed_, topic)));
  }

 private:
  std::uint64_t seed_;
  gateway::SyntheticCorpus fallback_;
  std::map<std::string, std::uint64_t> sizes_;
};

class ScratchDir {
 public:
  explicit ScratchDir(const fs::path& given) {
    if (!given.empty()) {
      path_ = given;
      fs::create_directories(path_);
      return;
    }
    std::string tmpl = (fs::temp_directory_path() / "dtnl-sim-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw Error(Errc::IoFailure, "cannot create a temporary directory");
    path_ = tmpl;
    owned_ = true;
  }
  ~ScratchDir() {
    std::error_code ec;
    if (owned_) fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool owned_ = false;
};

struct Ledger {
  std::map<BundleId, BundleRecord> bundles;
  std::map<BundleId, std::set<NodeId>> receivers;
};

class Observer : public node::NodeObserver {
 public:
  explicit Observer(Ledger& ledger) : ledger_(ledger) {}

  void bundle_created(const BundleHeader& h, Millis t) override {
    auto& r = ledger_.bundles[h.id];
    r.id = h.id;
    r.kind = h.kind;
    r.source = h.source;
    r.destination = h.destination;
    r.image_len = image_length(h);
    r.created_at = t;
  }
  void bundle_completed(const BundleId& id, Millis) override { ++ledger_.bundles[id].hops; }
  void bundle_delivered(const BundleHeader& h, Millis t) override {
    auto& r = ledger_.bundles[h.id];
    ++r.deliveries;
    if (!r.delivered_at) r.delivered_at = t;
  }

 private:
  Ledger& ledger_;
};

struct SimNode {
  Observer observer;
  std::unique_ptr<node::Node> node;
};

std::string seconds(Millis ms) {
  const char* sign = ms < 0 ? "-" : "";
  const std::uint64_t a = ms < 0 ? static_cast<std::uint64_t>(-ms) : static_cast<std::uint64_t>(ms);
  return fmt::format("{}{}.{:03}", sign, a / 1000, a % 1000);
}

std::string opt_seconds(const std::optional<Millis>& ms) { return ms ? seconds(*ms) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SimResult run_sim(const SimConfig& config, const RunOptions& options) {
  validate(config);
  const auto workload = expand_workload(config);
  const auto plan = build_contact_plan(config);
  ScratchDir scratch(options.work_dir);

  routing::RoleGraph graph;
  for (const auto& s : config.stops) graph.add(s.node, s.role);
  for (std::uint32_t m = 0; m < config.mule_count; ++m) graph.add(NodeId(mule_name(m)), NodeRole::Mule);
  const NodeId gateway = gateway_stop(config).node;
  std::vector<NodeId> rural_ids;
  for (const auto& s : config.stops)
    if (s.role == NodeRole::Rural) rural_ids.push_back(s.node);

  SimCorpus corpus(config, workload);
  Ledger ledger;
  std::map<NodeId, std::unique_ptr<SimNode>> nodes;
  for (const auto& [id, role] : graph.nodes()) {
    node::NodeOptions o;
    o.self = {id, role};
    o.graph = graph;
    o.store.root = scratch.path() / id.str() / "store";
    o.store.sync = false;
    o.store.chunk_size = config.chunk_size;
    o.store.partial_ttl = config.bundle_ttl;
    o.app_root = scratch.path() / id.str() / "app";
    o.sync = false;
    o.content_ttl = config.bundle_ttl;
    if (role == NodeRole::Rural) {
      o.gateway = gateway;
      o.sync_targets = {gateway};
    } else if (role == NodeRole::Urban) {
      o.sync_targets = rural_ids;
    }
    auto sn = std::make_unique<SimNode>(SimNode{Observer(ledger), nullptr});
    sn->node = std::make_unique<node::Node>(std::move(o), role == NodeRole::Urban ? &corpus : nullptr, &sn->observer);
    nodes.emplace(id, std::move(sn));
  }
  auto node_of = [&](const NodeId& id) -> node::Node& { return *nodes.at(id)->node; };

  SimResult result;
  result.config = config;
  auto& metrics = result.metrics;

  auto sample_freshness = [&](const NodeId& id, Millis t) {
    auto& n = node_of(id);
    if (n.self().role != NodeRole::Rural || !n.content()) return;
    if (auto newest = n.content()->catalog().newest_update()) metrics.freshness.push_back({t, id, t - *newest});
  };

  auto run_workload = [&](const WorkloadEvent& e) {
    auto& n = node_of(e.node);
    if (e.kind == WorkloadEvent::Kind::Request) {
      n.request_topic(e.topic, e.at);
    } else {
      const auto size = e.size.value_or(1000);
      n.publish(e.topic, gateway::synthetic_article(e.topic, size, text_seed(config.seed ^ static_cast<std::uint64_t>(e.at), e.topic)), e.at);
    }
    sample_freshness(e.node, e.at);
  };

  auto run_window = [&](const ContactWindow& w) {
    const Millis t = w.start;
    auto& stop = node_of(w.stop);
    auto& mule = node_of(NodeId(mule_name(w.mule)));
    stop.expire(t);
    mule.expire(t);

    std::map<BundleId, std::uint64_t> received;
    auto tap = [&](node::Node& n) {
      return [&n, &received, &ledger, t](const proto::Action& x) {
        const bool ok = n.apply(x, t);
        if (const auto* c = std::get_if<proto::StoreChunk>(&x); c && ok) {
          received[c->meta.id] += c->data.size();
          ledger.receivers[c->meta.id].insert(n.self().id);
        }
        return ok;
      };
    };
    proto::Session a(stop.session_env(true, t));
    proto::Session b(mule.session_env(false, t));
    const auto pipe = proto::run_pipe(a, b, w.byte_budget, t, tap(stop), tap(mule));
    stop.session_finished(a.state(), t);
    mule.session_finished(b.state(), t);

    ContactRecord rec;
    rec.window = w;
    rec.frame_bytes = pipe.bytes_delivered;
    rec.budget_exhausted = pipe.budget_exhausted;
    rec.aborted = a.state().phase == proto::Phase::Aborted || b.state().phase == proto::Phase::Aborted;
    rec.resumed = static_cast<std::uint32_t>(a.state().resumed_outgoing + b.state().resumed_outgoing);
    rec.handshake_bytes = a.state().handshake_bytes;
    std::set<BundleId> completed = a.state().completed_here;
    completed.insert(b.state().completed_here.begin(), b.state().completed_here.end());
    rec.bundles_completed = static_cast<std::uint32_t>(completed.size());
    for (const auto& [id, bytes] : received) {
      rec.payload_bytes += bytes;
      auto& br = ledger.bundles[id];
      br.chunk_bytes += bytes;
      if (!completed.count(id)) ++br.interrupted;
    }
    metrics.aborted_sessions += rec.aborted ? 1 : 0;
    metrics.resumed_transfers += rec.resumed;
    metrics.max_handshake_bytes = std::max(metrics.max_handshake_bytes, rec.handshake_bytes);
    metrics.contacts.push_back(rec);
    sample_freshness(w.stop, t);
  };

  auto next_gateway = [&]() -> std::pair<Millis, node::Node*> {
    std::pair<Millis, node::Node*> best{kNever, nullptr};
    for (auto& [id, sn] : nodes)
      if (auto due = sn->node->next_gateway_due(); due && *due < best.first) best = {*due, sn->node.get()};
    return best;
  };

  // Same-time order: workload, then contacts, then gateway polls.
  std::size_t wi = 0, ci = 0;
  Millis clock = 0;
  for (;;) {
    const Millis tw = wi < workload.size() ? workload[wi].at : kNever;
    const Millis tc = ci < plan.size() ? plan[ci].start : kNever;
    auto [tg, gw] = next_gateway();
    if (tg != kNever) tg = std::max(tg, clock);
    const Millis t = std::min({tw, tc, tg});
    if (t == kNever || t >= config.duration) break;
    clock = t;
    if (tw == t) {
      run_workload(workload[wi++]);
    } else if (tc == t) {
      run_window(plan[ci++]);
    } else {
      gw->expire(t);
      gw->poll_gateway(t);
    }
  }

  const Millis end = config.duration;
  for (auto& [id, sn] : nodes) sn->node->expire(end);
  for (const auto& id : rural_ids) sample_freshness(id, end);

  // Final states and the conservation audit.
  std::map<BundleId, std::pair<std::uint32_t, std::uint32_t>> copies;  // complete, partial
  for (auto& [id, sn] : nodes) {
    auto& n = *sn->node;
    NodeSnapshot snap;
    snap.id = id;
    snap.role = n.self().role;
    for (const auto& [bid, entry] : n.store().entries()) {
      if (entry.complete()) {
        snap.complete.push_back(bid);
        ++copies[bid].first;
      } else {
        snap.partial.push_back(bid);
        ++copies[bid].second;
      }
    }
    if (n.content()) {
      for (const auto& item : n.content()->catalog().list()) snap.catalog_titles.push_back(item.title);
      if (snap.role == NodeRole::Rural) {
        for (const auto* r : n.content()->requests().list()) {
          if (r->requester != id) continue;
          metrics.requests.push_back(
              {r->request_id, id, r->topic, r->created_at, content::to_string(r->status), r->resolved_at, r->fail_reason});
        }
      }
    }
    result.nodes.push_back(std::move(snap));
  }

  for (auto& [id, rec] : ledger.bundles) {
    const auto [complete, partial] = copies[id];
    rec.receivers = static_cast<std::uint32_t>(ledger.receivers[id].size());
    rec.complete_copies = complete;
    rec.partial_copies = partial;
    if (rec.deliveries > 1) metrics.duplicate_deliveries += rec.deliveries - 1;
    if (rec.deliveries > 0) {
      // A quarantined bundle stays at its destination; nowhere else may hold it.
      const auto* dest = nodes.at(rec.destination)->node.get();
      const std::uint32_t at_dest = dest->store().has_complete(id) ? 1 : 0;
      rec.fate = complete == at_dest ? Fate::Delivered : Fate::Violation;
      metrics.stale_partials += partial;
    } else if (rec.created_at + config.bundle_ttl <= end) {
      rec.fate = complete == 0 ? Fate::Expired : Fate::Violation;
    } else if (complete == 1) {
      rec.fate = partial > 0 ? Fate::PartialInFlight : Fate::Custody;
    } else {
      rec.fate = Fate::Violation;
    }
    if (rec.fate == Fate::Violation) ++metrics.conservation_violations;
    metrics.bundles.push_back(rec);
  }
  std::sort(metrics.bundles.begin(), metrics.bundles.end(),
            [](const auto& a, const auto& b) { return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id); });
  std::sort(metrics.requests.begin(), metrics.requests.end(), [](const auto& a, const auto& b) {
    return std::tie(a.created_at, a.request_id) < std::tie(b.created_at, b.request_id);
  });
  return result;
}

RttBounds analytic_bounds(const SimConfig& config, Millis request_time, std::optional<NodeId> rural) {
  validate(config);
  if (!config.contact_duration.is_fixed())
    throw Error(Errc::AssumptionViolated, "analytic bounds need fixed contact durations");
  const auto workload = expand_workload(config);
  std::uint64_t need = 64 * 1024;
  for (const auto& e : workload) need += 2 * (e.size.value_or(config.corpus_max_bytes) + 4096);
  if (byte_budget(config.contact_duration.min, config.link_rate_bps, config.overhead_ppm) < need)
    throw Error(Errc::AssumptionViolated, "a contact cannot carry the whole workload at once");

  NodeId home;
  if (rural) {
    home = *rural;
  } else {
    for (const auto& s : config.stops)
      if (s.role == NodeRole::Rural) {
        home = s.node;
        break;
      }
  }
  if (home.empty()) throw Error(Errc::AssumptionViolated, "no rural stop");
  const NodeId urban = gateway_stop(config).node;
  const auto plan = build_contact_plan(config);

  auto first = [&](auto pred) -> const ContactWindow& {
    for (const auto& w : plan)
      if (pred(w)) return w;
    throw Error(Errc::AssumptionViolated, "the round trip does not finish before the simulation ends");
  };
  const auto& pickup = first([&](const ContactWindow& w) { return w.stop == home && w.start >= request_time; });
  const auto& at_urban =
      first([&](const ContactWindow& w) { return w.mule == pickup.mule && w.stop == urban && w.start > pickup.start; });
  const auto& back = first([&](const ContactWindow& w) { return w.stop == urban && w.start > at_urban.start; });
  const auto& done =
      first([&](const ContactWindow& w) { return w.mule == back.mule && w.stop == home && w.start > back.start; });
  RttBounds b;
  b.pickup = pickup.start;
  b.at_urban = at_urban.start;
  b.response_pickup = back.start;
  b.fulfilled = done.start;
  b.min_rtt = b.max_rtt = done.start - request_time;
  return b;
}

Summary summarize(const SimResult& r) {
  Summary s;
  s.requests = r.metrics.requests.size();
  std::vector<Millis> rtts;
  for (const auto& q : r.metrics.requests) {
    if (auto rtt = q.rtt()) rtts.push_back(*rtt);
    if (q.status == "Failed") ++s.failed;
  }
  s.fulfilled = rtts.size();
  if (!rtts.empty()) {
    std::sort(rtts.begin(), rtts.end());
    double sum = 0;
    for (auto v : rtts) sum += static_cast<double>(v);
    s.mean_rtt_s = sum / static_cast<double>(rtts.size()) / 1000.0;
    const auto n = rtts.size();
    s.median_rtt_s = (n % 2 ? static_cast<double>(rtts[n / 2])
                            : (static_cast<double>(rtts[n / 2 - 1]) + static_cast<double>(rtts[n / 2])) / 2.0) /
                     1000.0;
  }
  s.bundles = r.metrics.bundles.size();
  for (const auto& b : r.metrics.bundles) s.delivered += b.fate == Fate::Delivered ? 1 : 0;
  if (!r.metrics.freshness.empty()) {
    double sum = 0;
    for (const auto& f : r.metrics.freshness) sum += static_cast<double>(f.age);
    s.mean_freshness_s = sum / static_cast<double>(r.metrics.freshness.size()) / 1000.0;
  }
  for (const auto& c : r.metrics.contacts) s.chunk_payload_bytes += c.payload_bytes;
  return s;
}

json summary_json(const SimResult& r) {
  const auto s = summarize(r);
  const auto& m = r.metrics;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["scenario"] = r.config.name;
  j["seed"] = r.config.seed;
  j["mule_count"] = r.config.mule_count;
  j["cycle_period_s"] = static_cast<double>(r.config.cycle_period) / 1000.0;
  j["duration_s"] = static_cast<double>(r.config.duration) / 1000.0;
  j["requests"] = s.requests;
  j["fulfilled"] = s.fulfilled;
  j["failed"] = s.failed;
  j["mean_rtt_s"] = opt(s.mean_rtt_s);
  j["median_rtt_s"] = opt(s.median_rtt_s);
  j["bundles"] = s.bundles;
  j["delivered"] = s.delivered;
  j["contacts"] = m.contacts.size();
  j["aborted_sessions"] = m.aborted_sessions;
  j["resumed_transfers"] = m.resumed_transfers;
  j["chunk_payload_bytes"] = s.chunk_payload_bytes;
  j["mean_freshness_s"] = opt(s.mean_freshness_s);
  j["conservation_violations"] = m.conservation_violations;
  j["duplicate_deliveries"] = m.duplicate_deliveries;
  j["stale_partials"] = m.stale_partials;
  j["max_handshake_bytes"] = m.max_handshake_bytes;
  // Shortest window that still completes the handshake at the modelled rate.
  const double usable_Bps = static_cast<double>(r.config.link_rate_bps) / 8.0 *
                            (1.0 - static_cast<double>(r.config.overhead_ppm) / 1e6);
  j["min_useful_contact_s"] = static_cast<double>(m.max_handshake_bytes) / usable_Bps;
  return j;
}

std::string bundles_csv(const SimMetrics& m) {
  std::string out =
      "bundle_id,kind,source,destination,image_bytes,created_s,delivered_s,latency_s,chunk_bytes,receivers,hops,"
      "interrupted,fate\n";
  for (const auto& b : m.bundles) {
    const auto latency = b.delivered_at ? std::optional<Millis>(*b.delivered_at - b.created_at) : std::nullopt;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_hex(b.id), to_string(b.kind),
                       csv_field(b.source.str()), csv_field(b.destination.str()), b.image_len, seconds(b.created_at),
                       opt_seconds(b.delivered_at), opt_seconds(latency), b.chunk_bytes, b.receivers, b.hops,
                       b.interrupted, to_string(b.fate));
  }
  return out;
}

std::string requests_csv(const SimMetrics& m) {
  std::string out = "request_id,node,topic,created_s,status,resolved_s,rtt_s,fail_reason\n";
  for (const auto& r : m.requests)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.request_id, csv_field(r.node.str()), csv_field(r.topic),
                       seconds(r.created_at), r.status, opt_seconds(r.resolved_at), opt_seconds(r.rtt()),
                       csv_field(r.fail_reason));
  return out;
}

std::string contacts_csv(const SimMetrics& m) {
  std::string out =
      "mule,stop,start_s,duration_s,byte_budget,frame_bytes,payload_bytes,handshake_bytes,goodput_Bps,completed,resumed,"
      "aborted\n";
  for (const auto& c : m.contacts)
    out += fmt::format("{},{},{},{},{},{},{},{},{:.1f},{},{},{}\n", mule_name(c.window.mule),
                       csv_field(c.window.stop.str()), seconds(c.window.start), seconds(c.window.duration),
                       c.window.byte_budget, c.frame_bytes, c.payload_bytes, c.handshake_bytes, c.goodput_Bps(),
                       c.bundles_completed, c.resumed, c.aborted ? 1 : 0);
  return out;
}

std::string freshness_csv(const SimMetrics& m) {
  std::string out = "time_s,node,age_s\n";
  for (const auto& f : m.freshness)
    out += fmt::format("{},{},{}\n", seconds(f.at), csv_field(f.node.str()), seconds(f.age));
  return out;
}

void write_outputs(const SimResult& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "bundles.csv", bundles_csv(r.metrics), false);
  write_file_atomic(dir / "requests.csv", requests_csv(r.metrics), false);
  write_file_atomic(dir / "contacts.csv", contacts_csv(r.metrics), false);
  write_file_atomic(dir / "freshness.csv", freshness_csv(r.metrics), false);
  write_file_atomic(dir / "summary.json", summary_json(r).dump(2) + "\n", false);
}

std::string format_summary(const SimResult& r) { return format_summary(summary_json(r)); }

std::string format_summary(const json& j) {
  auto num = [](const json& v, const char* unit) {
    return v.is_null() ? std::string("n/a") : fmt::format("{:.1f}{}", v.get<double>(), unit);
  };
  std::string out;
  out += fmt::format("scenario            {} (seed {})\n", j["scenario"].get<std::string>(),
                     j["seed"].get<std::uint64_t>());
  out += fmt::format("mule period         {:.0f} s, {} mule(s)\n", j["cycle_period_s"].get<double>(),
                     j["mule_count"].get<int>());
  out += fmt::format("requests            {} ({} fulfilled, {} failed)\n", j["requests"].get<std::size_t>(),
                     j["fulfilled"].get<std::size_t>(), j["failed"].get<std::size_t>());
  out += fmt::format("mean RTT            {}\n", num(j["mean_rtt_s"], " s"));
  out += fmt::format("median RTT          {}\n", num(j["median_rtt_s"], " s"));
  out += fmt::format("deliveries          {} of {} bundles\n", j["delivered"].get<std::size_t>(),
                     j["bundles"].get<std::size_t>());
  out += fmt::format("contacts            {}\n", j["contacts"].get<std::size_t>());
  out += fmt::format("aborted sessions    {}\n", j["aborted_sessions"].get<std::uint64_t>());
  out += fmt::format("resumed transfers   {}\n", j["resumed_transfers"].get<std::uint64_t>());
  out += fmt::format("mean freshness      {}\n", num(j["mean_freshness_s"], " s"));
  out += fmt::format("conservation        {}\n",
                     j["conservation_violations"].get<std::uint64_t>() == 0 ? "ok" : "VIOLATED");
  return out;
}

}  // namespace dtnl::sim
