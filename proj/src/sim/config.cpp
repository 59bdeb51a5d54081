// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/sim/config.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/random.hpp"

namespace dtnl::sim {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidConfig, what); }
[[noreturn]] void bad_scenario(const std::string& what) { throw Error(Errc::ScenarioInvalid, what); }

Millis seconds_to_ms(const json& v, const char* field) {
  if (!v.is_number()) bad_scenario(std::string(field) + ": expected a number of seconds");
  const double s = v.get<double>();
  if (!std::isfinite(s) || std::abs(s) > 1e12) bad_scenario(std::string(field) + ": out of range");
  return static_cast<Millis>(std::llround(s * 1000.0));
}

json ms_to_seconds(Millis ms) {
  if (ms % 1000 == 0) return ms / 1000;
  return static_cast<double>(ms) / 1000.0;
}

template <typename T>
T get_field(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) bad_scenario(std::string(where) + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad_scenario(std::string(where) + ": bad type for '" + key + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_scenario(key + ": expected an unsigned integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    auto v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_scenario(key + ": expected a number, got '" + value + "'");
  }
}

Millis parse_seconds(const std::string& key, const std::string& value) {
  return static_cast<Millis>(std::llround(parse_double(key, value) * 1000.0));
}

}  // namespace

std::string mule_name(std::uint32_t index) { return "mule-" + std::to_string(index + 1); }

const Stop& gateway_stop(const SimConfig& config) {
  for (const auto& s : config.stops)
    if (s.role == NodeRole::Urban) return s;
  invalid("no urban stop");
}

void validate(const SimConfig& c) {
  if (c.cycle_period <= 0) invalid("cycle_period must be > 0");
  if (c.stops.empty()) invalid("stops must not be empty");
  if (c.mule_count == 0 || c.mule_count > 255) invalid("mule_count must be in 1..255");
  if (c.link_rate_bps == 0) invalid("link_rate must be > 0");
  if (c.overhead_ppm >= 1'000'000) invalid("protocol_overhead must be < 1");
  if (c.contact_duration.min <= 0 || c.contact_duration.min > c.contact_duration.max)
    invalid("contact duration needs 0 < min <= max");
  if (c.duration <= 0) invalid("duration must be > 0");
  if (c.chunk_size == 0) invalid("chunk_size must be > 0");
  if (c.bundle_ttl <= 0) invalid("bundle_ttl must be > 0");
  if (c.corpus_min_bytes == 0 || c.corpus_min_bytes > c.corpus_max_bytes)
    invalid("corpus size range needs 0 < min <= max");

  std::set<NodeId> ids;
  std::vector<Millis> phases;
  bool urban = false;
  for (const auto& s : c.stops) {
    if (s.node.empty()) invalid("stop with empty node id");
    if (!ids.insert(s.node).second) invalid("duplicate stop " + s.node.str());
    if (s.role == NodeRole::Mule) invalid("stop " + s.node.str() + " cannot be a mule");
    if (s.phase < 0 || s.phase >= c.cycle_period) invalid("phase of " + s.node.str() + " must be in [0, cycle_period)");
    urban = urban || s.role == NodeRole::Urban;
    phases.push_back(s.phase);
  }
  if (!urban) invalid("at least one urban stop is required");
  for (std::uint32_t m = 0; m < c.mule_count; ++m)
    if (ids.count(NodeId(mule_name(m)))) invalid("stop id collides with " + mule_name(m));
  // One mule's windows must not overlap: each stop is left before the next.
  std::sort(phases.begin(), phases.end());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Millis next = i + 1 < phases.size() ? phases[i + 1] : phases[0] + c.cycle_period;
    if (next - phases[i] < c.contact_duration.max)
      invalid("stops closer than the maximum contact duration");
  }

  auto check_node = [&](const NodeId& node, const char* what) {
    auto it = std::find_if(c.stops.begin(), c.stops.end(), [&](const Stop& s) { return s.node == node; });
    if (it == c.stops.end()) throw Error(Errc::WorkloadError, std::string(what) + " names unknown node " + node.str());
    return it->role;
  };
  for (const auto& e : c.workload) {
    const auto role = check_node(e.node, "workload event");
    if (e.kind == WorkloadEvent::Kind::Request && role != NodeRole::Rural)
      throw Error(Errc::WorkloadError, "requests must come from a rural node, not " + e.node.str());
    if (e.topic.empty()) throw Error(Errc::WorkloadError, "workload event with empty topic/title");
    if (e.at < 0) throw Error(Errc::WorkloadError, "workload event before time 0");
    if (e.size && *e.size == 0) throw Error(Errc::WorkloadError, "workload event with size 0");
  }
  if (c.random_requests) {
    const auto& r = *c.random_requests;
    if (check_node(r.node, "random_requests") != NodeRole::Rural)
      throw Error(Errc::WorkloadError, "random_requests must target a rural node");
    if (r.count > 0 && (r.from < 0 || r.from >= r.to)) throw Error(Errc::WorkloadError, "random_requests needs 0 <= from < to");
  }
}

std::vector<WorkloadEvent> expand_workload(const SimConfig& c) {
  std::vector<WorkloadEvent> out = c.workload;
  if (c.random_requests && c.random_requests->count > 0) {
    const auto& r = *c.random_requests;
    // A stream of its own so the workload does not depend on the contact plan.
    std::mt19937_64 rng(c.seed ^ 0x776f726b6c6f6164ull);
    for (std::uint32_t i = 0; i < r.count; ++i) {
      WorkloadEvent e;
      e.kind = WorkloadEvent::Kind::Request;
      e.node = r.node;
      e.at = static_cast<Millis>(uniform_u64(rng, static_cast<std::uint64_t>(r.from), static_cast<std::uint64_t>(r.to - 1)));
      char topic[32];
      std::snprintf(topic, sizeof topic, "Topic %03u", i + 1);
      e.topic = topic;
      out.push_back(std::move(e));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
  return out;
}

SimConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) bad_scenario("scenario must be a JSON object");
  static const std::set<std::string> known = {"name", "cycle_period_s", "stops", "contact_duration", "link_rate_bps",
                                              "protocol_overhead", "mule_count", "seed", "duration_s", "workload",
                                              "random_requests", "corpus", "chunk_size", "bundle_ttl_s"};
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) bad_scenario("unknown key '" + k + "'");

  SimConfig c;
  c.stops.clear();
  if (doc.contains("name")) c.name = get_field<std::string>(doc, "name", "scenario");
  if (doc.contains("cycle_period_s")) c.cycle_period = seconds_to_ms(doc["cycle_period_s"], "cycle_period_s");
  if (!doc.contains("stops") || !doc["stops"].is_array()) bad_scenario("'stops' must be an array");
  for (const auto& s : doc["stops"]) {
    if (!s.is_object()) bad_scenario("stop must be an object");
    Stop stop;
    const auto node = get_field<std::string>(s, "node", "stop");
    if (node.empty() || node.size() > NodeId::kMaxBytes) bad_scenario("stop: bad node id '" + node + "'");
    stop.node = NodeId(node);
    const auto role = parse_role(get_field<std::string>(s, "role", "stop"));
    if (!role) bad_scenario("stop " + node + ": role must be rural or urban");
    stop.role = *role;
    if (!s.contains("phase_s")) bad_scenario("stop " + node + ": missing 'phase_s'");
    stop.phase = seconds_to_ms(s["phase_s"], "phase_s");
    c.stops.push_back(std::move(stop));
  }
  if (doc.contains("contact_duration")) {
    const auto& d = doc["contact_duration"];
    if (d.is_object() && d.contains("fixed_s")) {
      c.contact_duration = DurationDist::fixed(seconds_to_ms(d["fixed_s"], "fixed_s"));
    } else if (d.is_object() && d.contains("uniform_s") && d["uniform_s"].is_array() && d["uniform_s"].size() == 2) {
      c.contact_duration = DurationDist::uniform(seconds_to_ms(d["uniform_s"][0], "uniform_s"),
                                                 seconds_to_ms(d["uniform_s"][1], "uniform_s"));
    } else {
      bad_scenario("contact_duration must be {\"fixed_s\": s} or {\"uniform_s\": [min, max]}");
    }
  }
  if (doc.contains("link_rate_bps")) c.link_rate_bps = get_field<std::uint64_t>(doc, "link_rate_bps", "scenario");
  if (doc.contains("protocol_overhead")) {
    const double f = get_field<double>(doc, "protocol_overhead", "scenario");
    if (!(f >= 0.0 && f < 1.0)) bad_scenario("protocol_overhead must be in [0, 1)");
    c.overhead_ppm = static_cast<std::uint32_t>(std::llround(f * 1e6));
  }
  if (doc.contains("mule_count")) c.mule_count = get_field<std::uint32_t>(doc, "mule_count", "scenario");
  if (doc.contains("seed")) c.seed = get_field<std::uint64_t>(doc, "seed", "scenario");
  if (doc.contains("duration_s")) c.duration = seconds_to_ms(doc["duration_s"], "duration_s");
  if (doc.contains("chunk_size")) c.chunk_size = get_field<std::uint64_t>(doc, "chunk_size", "scenario");
  if (doc.contains("bundle_ttl_s")) c.bundle_ttl = seconds_to_ms(doc["bundle_ttl_s"], "bundle_ttl_s");
  if (doc.contains("corpus")) {
    const auto& k = doc["corpus"];
    if (!k.is_object()) bad_scenario("'corpus' must be an object");
    c.corpus_min_bytes = get_field<std::uint64_t>(k, "min_bytes", "corpus");
    c.corpus_max_bytes = get_field<std::uint64_t>(k, "max_bytes", "corpus");
  }
  if (doc.contains("workload")) {
    if (!doc["workload"].is_array()) bad_scenario("'workload' must be an array");
    for (const auto& w : doc["workload"]) {
      if (!w.is_object()) bad_scenario("workload event must be an object");
      WorkloadEvent e;
      const auto kind = get_field<std::string>(w, "kind", "workload event");
      if (kind == "request") {
        e.kind = WorkloadEvent::Kind::Request;
        e.topic = get_field<std::string>(w, "topic", "request");
      } else if (kind == "publish") {
        e.kind = WorkloadEvent::Kind::Publish;
        e.topic = get_field<std::string>(w, "title", "publish");
        if (!w.contains("size")) bad_scenario("publish: missing 'size'");
      } else {
        bad_scenario("workload kind must be request or publish, got '" + kind + "'");
      }
      if (!w.contains("at_s")) bad_scenario("workload event: missing 'at_s'");
      e.at = seconds_to_ms(w["at_s"], "at_s");
      const auto node = get_field<std::string>(w, "node", "workload event");
      if (node.empty() || node.size() > NodeId::kMaxBytes) bad_scenario("workload event: bad node id");
      e.node = NodeId(node);
      if (w.contains("size")) e.size = get_field<std::uint64_t>(w, "size", "workload event");
      c.workload.push_back(std::move(e));
    }
  }
  if (doc.contains("random_requests")) {
    const auto& r = doc["random_requests"];
    if (!r.is_object()) bad_scenario("'random_requests' must be an object");
    RandomRequests rr;
    rr.count = get_field<std::uint32_t>(r, "count", "random_requests");
    const auto node = get_field<std::string>(r, "node", "random_requests");
    if (node.empty() || node.size() > NodeId::kMaxBytes) bad_scenario("random_requests: bad node id");
    rr.node = NodeId(node);
    if (!r.contains("from_s") || !r.contains("to_s")) bad_scenario("random_requests: needs from_s and to_s");
    rr.from = seconds_to_ms(r["from_s"], "from_s");
    rr.to = seconds_to_ms(r["to_s"], "to_s");
    c.random_requests = rr;
  }
  try {
    validate(c);
  } catch (const Error& e) {
    bad_scenario(e.what());
  }
  return c;
}

SimConfig load_scenario(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) bad_scenario("cannot read scenario " + path.string());
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    bad_scenario(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const SimConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["cycle_period_s"] = ms_to_seconds(c.cycle_period);
  doc["stops"] = json::array();
  for (const auto& s : c.stops)
    doc["stops"].push_back({{"node", s.node.str()}, {"role", to_string(s.role)}, {"phase_s", ms_to_seconds(s.phase)}});
  if (c.contact_duration.is_fixed())
    doc["contact_duration"] = {{"fixed_s", ms_to_seconds(c.contact_duration.min)}};
  else
    doc["contact_duration"] = {{"uniform_s", {ms_to_seconds(c.contact_duration.min), ms_to_seconds(c.contact_duration.max)}}};
  doc["link_rate_bps"] = c.link_rate_bps;
  doc["protocol_overhead"] = static_cast<double>(c.overhead_ppm) / 1e6;
  doc["mule_count"] = c.mule_count;
  doc["seed"] = c.seed;
  doc["duration_s"] = ms_to_seconds(c.duration);
  doc["chunk_size"] = c.chunk_size;
  doc["bundle_ttl_s"] = ms_to_seconds(c.bundle_ttl);
  doc["corpus"] = {{"min_bytes", c.corpus_min_bytes}, {"max_bytes", c.corpus_max_bytes}};
  doc["workload"] = json::array();
  for (const auto& e : c.workload) {
    json w = {{"at_s", ms_to_seconds(e.at)}, {"node", e.node.str()}};
    if (e.kind == WorkloadEvent::Kind::Request) {
      w["kind"] = "request";
      w["topic"] = e.topic;
    } else {
      w["kind"] = "publish";
      w["title"] = e.topic;
    }
    if (e.size) w["size"] = *e.size;
    doc["workload"].push_back(std::move(w));
  }
  if (c.random_requests) {
    const auto& r = *c.random_requests;
    doc["random_requests"] = {{"count", r.count},
                              {"node", r.node.str()},
                              {"from_s", ms_to_seconds(r.from)},
                              {"to_s", ms_to_seconds(r.to)}};
  }
  return doc;
}

SimConfig campus_default() {
  SimConfig c;
  c.name = "campus-default";
  c.cycle_period = 2400 * kSecond;
  c.stops = {{NodeId("rural-1"), NodeRole::Rural, 0}, {NodeId("urban-1"), NodeRole::Urban, 1200 * kSecond}};
  c.contact_duration = DurationDist::uniform(5 * kSecond, 30 * kSecond);
  c.link_rate_bps = 20'000'000;
  c.overhead_ppm = 50'000;
  c.mule_count = 1;
  c.seed = 7;
  c.duration = 48 * kHour;
  c.random_requests = RandomRequests{10, NodeId("rural-1"), 0, 12 * kHour};
  c.corpus_min_bytes = 10'000'000;
  c.corpus_max_bytes = 30'000'000;
  return c;
}

std::optional<SimConfig> builtin_scenario(const std::string& name) {
  if (name == "campus-default") return campus_default();
  return std::nullopt;
}

void set_param(SimConfig& c, const std::string& key, const std::string& value) {
  if (key == "mule_count") c.mule_count = static_cast<std::uint32_t>(parse_u64(key, value));
  else if (key == "seed") c.seed = parse_u64(key, value);
  else if (key == "cycle_period_s") c.cycle_period = parse_seconds(key, value);
  else if (key == "duration_s") c.duration = parse_seconds(key, value);
  else if (key == "link_rate_bps") c.link_rate_bps = parse_u64(key, value);
  else if (key == "protocol_overhead") c.overhead_ppm = static_cast<std::uint32_t>(std::llround(parse_double(key, value) * 1e6));
  else if (key == "contact_fixed_s") c.contact_duration = DurationDist::fixed(parse_seconds(key, value));
  else if (key == "contact_min_s") c.contact_duration.min = parse_seconds(key, value);
  else if (key == "contact_max_s") c.contact_duration.max = parse_seconds(key, value);
  else if (key == "chunk_size") c.chunk_size = parse_u64(key, value);
  else if (key == "requests") {
    if (!c.random_requests) bad_scenario("requests: scenario has no random_requests block");
    c.random_requests->count = static_cast<std::uint32_t>(parse_u64(key, value));
  } else bad_scenario("unknown parameter '" + key + "'");
}

}  // namespace dtnl::sim
