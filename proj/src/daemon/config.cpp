// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/daemon/config.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/text.hpp"

extern char** environ;

namespace dtnl::daemon {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(Errc::InvalidConfig, key + ": " + why);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "node_id", "role", "data_dir", "quota_bytes", "chunk_size", "fsync", "listen_host", "listen_port",
      "beacon_targets", "beacon_interval_ms", "start_in_range", "recontact_holdoff_ms", "link_rate_bps", "peers",
      "gateway", "sync_targets", "corpus_backend", "corpus_path", "synthetic_seed", "synthetic_min_bytes",
      "synthetic_max_bytes", "live_url", "api_bind", "static_dir", "hello_timeout_ms", "idle_timeout_ms",
      "tick_ms", "request_ttl_s", "bundle_ttl_s", "fetch_retries", "fetch_backoff_ms", "log_level"};
  return keys;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
    bad(key, "expected an unsigned integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    bad(key, "value out of range: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected true or false, got '" + v + "'");
}

int to_port(const std::string& key, const std::string& v) {
  const auto p = to_u64(key, v);
  if (p > 65535) bad(key, "port out of range: " + v);
  return static_cast<int>(p);
}

Endpoint to_endpoint(const std::string& key, const std::string& v) {
  const auto colon = v.rfind(':');
  if (colon == std::string::npos || colon == 0) bad(key, "expected host:port, got '" + v + "'");
  return {v.substr(0, colon), to_port(key, v.substr(colon + 1))};
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    auto item = trim(v.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

NodeId to_node_id(const std::string& key, const std::string& v) {
  if (v.empty() || v.size() > NodeId::kMaxBytes || !valid_utf8(v)) bad(key, "invalid node id '" + v + "'");
  return NodeId(v);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

NodeConfig make_config(std::map<std::string, std::string> values, const std::map<std::string, std::string>& env) {
  for (const auto& key : known_keys()) {
    std::string var = "DTLN_";
    for (char c : key) var.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (auto it = env.find(var); it != env.end()) values[key] = it->second;
  }
  for (const auto& [k, v] : values)
    if (!known_keys().count(k)) bad(k, "unknown key");

  auto has = [&](const char* k) { return values.count(k) && !values.at(k).empty(); };
  auto get = [&](const char* k) { return values.at(k); };

  NodeConfig c;
  if (!has("node_id")) bad("node_id", "required");
  c.node_id = to_node_id("node_id", get("node_id"));
  if (!has("role")) bad("role", "required");
  const auto role = parse_role(get("role"));
  if (!role) bad("role", "invalid value '" + get("role") + "' (expected rural, mule or urban)");
  c.role = *role;
  if (!has("data_dir")) bad("data_dir", "required");
  c.data_dir = get("data_dir");

  if (has("quota_bytes")) c.quota_bytes = to_u64("quota_bytes", get("quota_bytes"));
  if (has("chunk_size")) c.chunk_size = to_u64("chunk_size", get("chunk_size"));
  if (c.chunk_size == 0 || c.chunk_size > (1u << 20) - 64) bad("chunk_size", "must be in 1..1048512");
  if (has("fsync")) c.fsync = to_bool("fsync", get("fsync"));
  if (has("listen_host")) c.listen_host = get("listen_host");
  if (has("listen_port")) c.listen_port = to_port("listen_port", get("listen_port"));
  if (has("beacon_targets"))
    for (const auto& t : split_list(get("beacon_targets"))) c.beacon_targets.push_back(to_endpoint("beacon_targets", t));
  if (has("beacon_interval_ms")) c.beacon_interval = static_cast<Millis>(to_u64("beacon_interval_ms", get("beacon_interval_ms")));
  if (c.beacon_interval <= 0) bad("beacon_interval_ms", "must be > 0");
  if (has("start_in_range")) c.start_in_range = to_bool("start_in_range", get("start_in_range"));
  if (has("recontact_holdoff_ms"))
    c.recontact_holdoff = static_cast<Millis>(to_u64("recontact_holdoff_ms", get("recontact_holdoff_ms")));
  if (has("link_rate_bps")) c.link_rate_bps = to_u64("link_rate_bps", get("link_rate_bps"));

  if (!has("peers")) bad("peers", "required (id:role,... for every node in the network)");
  try {
    c.peers = routing::RoleGraph::parse(get("peers"));
  } catch (const Error& e) {
    bad("peers", e.what());
  }
  if (auto r = c.peers.role_of(c.node_id); r && *r != c.role) bad("peers", "lists " + c.node_id.str() + " with another role");
  c.peers.add(c.node_id, c.role);

  if (has("gateway")) c.gateway = to_node_id("gateway", get("gateway"));
  if (c.role == NodeRole::Rural) {
    if (!c.gateway) bad("gateway", "required for a rural node");
    if (c.peers.role_of(*c.gateway) != NodeRole::Urban) bad("gateway", c.gateway->str() + " is not an urban node in peers");
  } else if (c.gateway) {
    bad("gateway", "only valid for a rural node");
  }
  if (has("sync_targets")) {
    for (const auto& t : split_list(get("sync_targets"))) {
      auto id = to_node_id("sync_targets", t);
      if (!c.peers.contains(id)) bad("sync_targets", t + " is not in peers");
      c.sync_targets.push_back(std::move(id));
    }
  }

  if (has("corpus_backend")) {
    const auto b = get("corpus_backend");
    if (b == "offline") c.corpus_backend = CorpusBackend::Offline;
    else if (b == "synthetic") c.corpus_backend = CorpusBackend::Synthetic;
    else if (b == "live") c.corpus_backend = CorpusBackend::Live;
    else bad("corpus_backend", "invalid value '" + b + "' (expected offline, synthetic or live)");
    if (c.role != NodeRole::Urban) bad("corpus_backend", "only valid for an urban node");
  }
  if (has("corpus_path")) c.corpus_path = get("corpus_path");
  if (c.role == NodeRole::Urban && c.corpus_backend == CorpusBackend::Offline && c.corpus_path.empty())
    bad("corpus_path", "required for an urban node with the offline backend");
  if (c.role != NodeRole::Urban && !c.corpus_path.empty()) bad("corpus_path", "only valid for an urban node");
  if (has("synthetic_seed")) c.synthetic_seed = to_u64("synthetic_seed", get("synthetic_seed"));
  if (has("synthetic_min_bytes")) c.synthetic_min_bytes = to_u64("synthetic_min_bytes", get("synthetic_min_bytes"));
  if (has("synthetic_max_bytes")) c.synthetic_max_bytes = to_u64("synthetic_max_bytes", get("synthetic_max_bytes"));
  if (c.synthetic_min_bytes == 0 || c.synthetic_min_bytes > c.synthetic_max_bytes)
    bad("synthetic_min_bytes", "needs 0 < synthetic_min_bytes <= synthetic_max_bytes");
  if (has("live_url")) c.live_url = get("live_url");

  if (has("api_bind")) {
    if (c.role == NodeRole::Mule) bad("api_bind", "the content API runs on rural and urban nodes only");
    c.api_bind = to_endpoint("api_bind", get("api_bind"));
  }
  if (has("static_dir")) c.static_dir = get("static_dir");

  if (c.role == NodeRole::Mule && c.beacon_targets.empty()) bad("beacon_targets", "required for a mule");
  if (c.role != NodeRole::Mule && !c.beacon_targets.empty()) bad("beacon_targets", "only valid for a mule");

  if (has("hello_timeout_ms")) c.timers.hello_timeout = static_cast<Millis>(to_u64("hello_timeout_ms", get("hello_timeout_ms")));
  if (has("idle_timeout_ms")) c.timers.idle_timeout = static_cast<Millis>(to_u64("idle_timeout_ms", get("idle_timeout_ms")));
  if (has("tick_ms")) c.tick_interval = static_cast<Millis>(to_u64("tick_ms", get("tick_ms")));
  if (c.tick_interval <= 0) bad("tick_ms", "must be > 0");
  if (has("request_ttl_s")) c.request_ttl = static_cast<Millis>(to_u64("request_ttl_s", get("request_ttl_s"))) * kSecond;
  if (has("bundle_ttl_s")) c.bundle_ttl = static_cast<Millis>(to_u64("bundle_ttl_s", get("bundle_ttl_s"))) * kSecond;
  if (c.request_ttl <= 0 || c.bundle_ttl <= 0) bad("bundle_ttl_s", "TTLs must be > 0");
  if (has("fetch_retries")) c.fetch_retries = static_cast<int>(to_u64("fetch_retries", get("fetch_retries")));
  if (has("fetch_backoff_ms")) c.fetch_backoff = static_cast<Millis>(to_u64("fetch_backoff_ms", get("fetch_backoff_ms")));
  if (has("log_level")) {
    c.log_level = get("log_level");
    static const std::set<std::string> levels = {"debug", "info", "warn", "error", "off"};
    if (!levels.count(c.log_level)) bad("log_level", "invalid value '" + c.log_level + "'");
  }
  return c;
}

NodeConfig load_config(const std::filesystem::path& path, const std::map<std::string, std::string>& env) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(Errc::InvalidConfig, "config: cannot read " + path.string());
  return make_config(parse_key_values(read_text(path)), env);
}

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string kv = *e;
    if (kv.rfind("DTLN_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

node::NodeOptions NodeConfig::node_options() const {
  node::NodeOptions o;
  o.self = {node_id, role};
  o.graph = peers;
  o.store.root = data_dir / "store";
  o.store.quota = quota_bytes;
  o.store.chunk_size = chunk_size;
  o.store.sync = fsync;
  o.store.partial_ttl = bundle_ttl;
  o.app_root = data_dir / "app";
  o.sync = fsync;
  o.gateway = gateway;
  o.sync_targets = sync_targets;
  if (o.sync_targets.empty()) {
    // Default: rural nodes sync to their gateway; urban nodes to every rural node.
    if (role == NodeRole::Rural && gateway) o.sync_targets = {*gateway};
    if (role == NodeRole::Urban)
      for (const auto& [id, r] : peers.nodes())
        if (r == NodeRole::Rural) o.sync_targets.push_back(id);
  }
  o.request_ttl = request_ttl;
  o.content_ttl = bundle_ttl;
  o.max_retries = fetch_retries;
  o.base_backoff = fetch_backoff;
  o.timers = timers;
  return o;
}

}  // namespace dtnl::daemon
