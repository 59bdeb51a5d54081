// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/daemon/daemon.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/log.hpp"
#include "dtnl/content/api.hpp"
#include "dtnl/content/http_server.hpp"
#include "dtnl/gateway/source.hpp"
#include "dtnl/node/node.hpp"
#include "dtnl/proto/messages.hpp"

namespace dtnl::daemon {

namespace {

std::atomic<unsigned> g_stop_requests{0};
std::atomic<unsigned> g_toggle_requests{0};

using nlohmann::json;

[[noreturn]] void bind_failure(const std::string& what) {
  throw Error(Errc::BindFailure, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const std::string& host, int port) {
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(static_cast<std::uint16_t>(port));
  if (host.empty() || host == "0.0.0.0" || host == "*") {
    a.sin_addr.s_addr = htonl(INADDR_ANY);
    return a;
  }
  if (inet_pton(AF_INET, host.c_str(), &a.sin_addr) == 1) return a;
  addrinfo hints{}, *res = nullptr;
  hints.ai_family = AF_INET;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
    throw Error(Errc::InvalidConfig, "cannot resolve host '" + host + "'");
  a.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return a;
}

std::string describe(const sockaddr_in& a) {
  char buf[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &a.sin_addr, buf, sizeof buf);
  return std::string(buf) + ":" + std::to_string(ntohs(a.sin_port));
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

/// Appends audit events as JSON lines to <data_dir>/events.log.
class EventLog : public node::NodeObserver {
 public:
  explicit EventLog(std::filesystem::path path) : path_(std::move(path)) {}

  void write(const std::string& event, Millis t, json fields = json::object()) {
    fields["event"] = event;
    fields["t"] = t;
    append_line(path_, fields.dump(), false);
  }

  void bundle_created(const BundleHeader& h, Millis t) override {
    write("bundle_created", t, {{"id", to_hex(h.id)}, {"kind", to_string(h.kind)}, {"destination", h.destination.str()}});
  }
  void bundle_completed(const BundleId& id, Millis t) override { write("bundle_completed", t, {{"id", to_hex(id)}}); }
  void bundle_delivered(const BundleHeader& h, Millis t) override {
    write("bundle_delivered", t, {{"id", to_hex(h.id)}, {"kind", to_string(h.kind)}});
  }
  void custody_released(const BundleId& id, Millis t) override { write("custody_released", t, {{"id", to_hex(id)}}); }
  void request_resolved(const content::TopicRequest& r, Millis t) override {
    write("request_resolved", t, {{"request_id", r.request_id}, {"status", content::to_string(r.status)}});
  }

 private:
  std::filesystem::path path_;
};

std::unique_ptr<gateway::ArticleSource> make_source(const NodeConfig& c) {
  if (c.role != NodeRole::Urban) return nullptr;
  switch (c.corpus_backend) {
    case CorpusBackend::Offline: return std::make_unique<gateway::OfflineCorpus>(c.corpus_path);
    case CorpusBackend::Synthetic:
      return std::make_unique<gateway::SyntheticCorpus>(c.synthetic_seed, c.synthetic_min_bytes, c.synthetic_max_bytes);
    case CorpusBackend::Live: return gateway::make_live_source(c.live_url);
  }
  return nullptr;
}

log::Level parse_level(const std::string& s) {
  if (s == "debug") return log::Level::Debug;
  if (s == "warn") return log::Level::Warn;
  if (s == "error") return log::Level::Error;
  if (s == "off") return log::Level::Off;
  return log::Level::Info;
}

}  // namespace

void signal_stop() { g_stop_requests.fetch_add(1); }
void signal_toggle_range() { g_toggle_requests.fetch_add(1); }

struct Daemon::Impl {
  NodeConfig config;
  EventLog events;
  std::unique_ptr<gateway::ArticleSource> source;
  std::shared_mutex mutex;
  std::unique_ptr<node::Node> node;
  std::unique_ptr<content::Api> api;
  std::unique_ptr<content::HttpServer> http;

  int udp_fd = -1;
  int listen_fd = -1;
  int bound_port = -1;
  std::atomic<bool> stopping{false};
  std::atomic<bool> in_range{false};
  unsigned seen_stop = 0;
  unsigned seen_toggle = 0;

  struct Active {
    int fd = -1;
    std::string remote;
    std::unique_ptr<proto::Session> session;
    Bytes rx;
    Millis started = 0;
    double send_credit_ms = 0;  // pacing clock
  };
  std::optional<Active> active;
  std::map<NodeId, Millis> holdoff_until;
  Millis next_beacon = 0;
  Millis next_tick = 0;

  explicit Impl(NodeConfig c) : config(std::move(c)), events(config.data_dir / "events.log") {}

  Millis now() const { return wall_clock_ms(); }

  // ---- sockets -------------------------------------------------------

  void bind_sockets() {
    const auto addr = resolve(config.listen_host, config.listen_port);
    udp_fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
    if (udp_fd < 0) bind_failure("udp socket");
    int one = 1;
    ::setsockopt(udp_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(udp_fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
      bind_failure("bind udp " + describe(addr));
    sockaddr_in actual{};
    socklen_t len = sizeof actual;
    ::getsockname(udp_fd, reinterpret_cast<sockaddr*>(&actual), &len);
    bound_port = ntohs(actual.sin_port);

    if (config.role == NodeRole::Mule) {
      listen_fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
      if (listen_fd < 0) bind_failure("tcp socket");
      ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      auto tcp_addr = addr;
      tcp_addr.sin_port = htons(static_cast<std::uint16_t>(bound_port));
      if (::bind(listen_fd, reinterpret_cast<const sockaddr*>(&tcp_addr), sizeof tcp_addr) != 0)
        bind_failure("bind tcp " + describe(tcp_addr));
      if (::listen(listen_fd, 4) != 0) bind_failure("listen");
    }
  }

  void send_beacons() {
    const auto bytes = proto::encode_frame(proto::make_beacon({config.node_id, config.role}));
    for (const auto& t : config.beacon_targets) {
      sockaddr_in to{};
      try {
        to = resolve(t.host, t.port);
      } catch (const Error& e) {
        log::warn(e.what());
        continue;
      }
      ::sendto(udp_fd, bytes.data(), bytes.size(), MSG_DONTWAIT, reinterpret_cast<const sockaddr*>(&to), sizeof to);
    }
  }

  void on_udp() {
    std::uint8_t buf[2048];
    sockaddr_in from{};
    socklen_t len = sizeof from;
    const auto n = ::recvfrom(udp_fd, buf, sizeof buf, MSG_DONTWAIT, reinterpret_cast<sockaddr*>(&from), &len);
    if (n <= 0 || config.role == NodeRole::Mule || active) return;
    auto d = proto::decode_frame(ByteView(buf, static_cast<std::size_t>(n)));
    if (d.status != proto::DecodeStatus::Ok || d.frame.type != proto::FrameType::Beacon) return;
    auto who = proto::parse_announce(d.frame);
    if (!who || who->role != NodeRole::Mule || who->node == config.node_id) return;
    const Millis t = now();
    if (auto it = holdoff_until.find(who->node); it != holdoff_until.end() && t < it->second) return;
    connect_to(from, who->node, t);
  }

  void connect_to(const sockaddr_in& addr, const NodeId& mule, Millis t) {
    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0);
    if (fd < 0) return;
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 && errno != EINPROGRESS) {
      ::close(fd);
      return;
    }
    pollfd p{fd, POLLOUT, 0};
    int err = 0;
    socklen_t len = sizeof err;
    if (::poll(&p, 1, 1000) != 1 || ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0) {
      log::info("node " + config.node_id.str() + ": connect to " + mule.str() + " at " + describe(addr) + " failed");
      ::close(fd);
      return;
    }
    begin_session(fd, describe(addr), /*initiator=*/true, t);
  }

  void on_accept() {
    sockaddr_in from{};
    socklen_t len = sizeof from;
    int fd = ::accept4(listen_fd, reinterpret_cast<sockaddr*>(&from), &len, SOCK_CLOEXEC);
    if (fd < 0) return;
    if (active || !in_range.load()) {
      ::close(fd);  // one contact at a time
      return;
    }
    begin_session(fd, describe(from), /*initiator=*/false, now());
  }

  // ---- sessions ------------------------------------------------------

  void begin_session(int fd, std::string remote, bool initiator, Millis t) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);  // sends block; reads are poll-driven
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    timeval tv{5, 0};
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    Active a;
    a.fd = fd;
    a.remote = std::move(remote);
    a.started = t;
    {
      std::unique_lock lock(mutex);
      a.session = std::make_unique<proto::Session>(node->session_env(initiator, t));
    }
    active = std::move(a);
    events.write("contact_start", t, {{"remote", active->remote}, {"initiator", initiator}});
    step(proto::LinkUp{t});
  }

  bool send_frame(const proto::Frame& f) {
    const auto bytes = proto::encode_frame(f);
    std::size_t off = 0;
    while (off < bytes.size()) {
      const auto n = ::send(active->fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        return false;
      }
      off += static_cast<std::size_t>(n);
    }
    if (config.link_rate_bps > 0) {
      // Pace to the configured link rate.
      const double cost_ms = static_cast<double>(bytes.size()) * 8000.0 / static_cast<double>(config.link_rate_bps);
      const auto t = static_cast<double>(now());
      active->send_credit_ms = std::max(active->send_credit_ms, t) + cost_ms;
      if (active->send_credit_ms > t)
        std::this_thread::sleep_for(std::chrono::microseconds(static_cast<std::int64_t>((active->send_credit_ms - t) * 1000)));
    }
    return true;
  }

  /// Feeds one event; runs the resulting actions in order. Stops at the
  /// first failure and drops the link.
  void step(const proto::Event& ev) {
    if (!active) return;
    std::vector<proto::Action> actions = active->session->step(ev);
    bool link_lost = false;
    for (const auto& a : actions) {
      if (const auto* s = std::get_if<proto::SendFrame>(&a)) {
        if (!send_frame(s->frame)) {
          link_lost = true;
          break;
        }
        continue;
      }
      if (std::holds_alternative<proto::CloseLink>(a)) continue;
      bool ok;
      {
        std::unique_lock lock(mutex);
        ok = node->apply(a, now());
      }
      if (!ok) {
        link_lost = true;
        break;
      }
    }
    if (link_lost && !active->session->state().terminal()) active->session->step(proto::LinkDown{now()});
    if (active->session->state().terminal()) finish_session();
  }

  void finish_session() {
    const Millis t = now();
    const auto& st = active->session->state();
    {
      std::unique_lock lock(mutex);
      node->session_finished(st, t);
    }
    if (st.phase == proto::Phase::Done && st.peer) holdoff_until[st.peer->id] = t + config.recontact_holdoff;
    json f = {{"remote", active->remote},
              {"phase", proto::to_string(st.phase)},
              {"bytes_sent", st.bytes_sent},
              {"bytes_received", st.bytes_received},
              {"resumed", st.resumed_outgoing}};
    if (st.peer) f["peer"] = st.peer->id.str();
    if (!st.abort_reason.empty()) f["reason"] = st.abort_reason;
    events.write("contact_end", t, f);
    log::info("node " + config.node_id.str() + ": contact with " + active->remote + " ended " + proto::to_string(st.phase));
    close_fd(active->fd);
    active.reset();
  }

  void on_session_readable() {
    std::uint8_t buf[256 * 1024];
    const auto n = ::recv(active->fd, buf, sizeof buf, MSG_DONTWAIT);
    if (n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)) {
      step(proto::LinkDown{now()});
      return;
    }
    if (n < 0) return;
    active->rx.insert(active->rx.end(), buf, buf + n);
    std::size_t used = 0;
    while (active) {
      auto d = proto::decode_frame(ByteView(active->rx.data() + used, active->rx.size() - used));
      if (d.status == proto::DecodeStatus::Truncated) break;
      if (d.status != proto::DecodeStatus::Ok) {
        log::warn("node " + config.node_id.str() + ": bad frame from " + active->remote + ": " + proto::to_string(d.status));
        step(proto::LinkDown{now()});
        return;
      }
      used += d.consumed;
      step(proto::FrameReceived{std::move(d.frame), now()});
    }
    if (active) active->rx.erase(active->rx.begin(), active->rx.begin() + static_cast<std::ptrdiff_t>(used));
  }

  void drop_session(const char* why) {
    if (!active) return;
    log::info(std::string("node ") + config.node_id.str() + ": dropping contact: " + why);
    step(proto::LinkDown{now()});
  }

  // ---- loop ----------------------------------------------------------

  void housekeeping(Millis t) {
    if (t < next_tick) return;
    next_tick = t + config.tick_interval;
    if (active) step(proto::Tick{t});
    std::unique_lock lock(mutex);
    node->tick(t);
  }

  void run() {
    while (!stopping.load()) {
      const unsigned stops = g_stop_requests.load();
      if (stops != seen_stop) {
        seen_stop = stops;
        break;
      }
      const unsigned toggles = g_toggle_requests.load();
      if (toggles != seen_toggle && config.role == NodeRole::Mule) {
        const bool flips = (toggles - seen_toggle) % 2 == 1;
        seen_toggle = toggles;
        if (flips) {
          in_range = !in_range.load();
          events.write(in_range ? "in_range" : "out_of_range", now());
          if (!in_range) drop_session("left range");
        }
      }
      seen_toggle = toggles;

      Millis t = now();
      if (config.role == NodeRole::Mule && in_range && !active && t >= next_beacon) {
        send_beacons();
        next_beacon = t + config.beacon_interval;
      }

      pollfd fds[3];
      nfds_t n = 0;
      fds[n++] = {udp_fd, POLLIN, 0};
      if (listen_fd >= 0) fds[n++] = {listen_fd, POLLIN, 0};
      if (active) fds[n++] = {active->fd, POLLIN, 0};
      const int timeout = static_cast<int>(std::min<Millis>(50, config.tick_interval));
      const int r = ::poll(fds, n, timeout);
      if (r < 0 && errno != EINTR) throw Error(Errc::IoFailure, std::string("poll: ") + std::strerror(errno));
      if (r > 0) {
        for (nfds_t i = 0; i < n; ++i) {
          if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
          if (fds[i].fd == udp_fd) on_udp();
          else if (fds[i].fd == listen_fd) on_accept();
          else if (active && fds[i].fd == active->fd) on_session_readable();
        }
      }
      housekeeping(now());
    }
    drop_session("shutting down");
    events.write("stopped", now());
  }
};

Daemon::Daemon(NodeConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& d = *impl_;
  log::set_level(parse_level(d.config.log_level));
  std::error_code ec;
  std::filesystem::create_directories(d.config.data_dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + d.config.data_dir.string() + ": " + ec.message());
  d.source = make_source(d.config);
  d.node = std::make_unique<node::Node>(d.config.node_options(), d.source.get(), &d.events);
  d.node->recover(d.now());
  d.in_range = d.config.role == NodeRole::Mule && d.config.start_in_range;
  d.events.write("started", d.now(), {{"node", d.config.node_id.str()}, {"role", to_string(d.config.role)}});
}

Daemon::~Daemon() {
  if (impl_->http) impl_->http->stop();
  close_fd(impl_->udp_fd);
  close_fd(impl_->listen_fd);
}

void Daemon::start() {
  auto& d = *impl_;
  d.bind_sockets();
  if (d.config.api_bind) {
    content::Api::Hooks hooks;
    hooks.clock = wall_clock_ms;
    hooks.node_status = [&d] {
      auto j = d.node->status_json();
      j["in_range"] = d.in_range.load();
      return j;
    };
    if (d.node->fetch_gateway()) hooks.gateway_jobs = [&d] { return d.node->fetch_gateway()->jobs_json(); };
    d.api = std::make_unique<content::Api>(d.node->content(), std::move(hooks));
    d.http = std::make_unique<content::HttpServer>(*d.api, d.mutex, d.config.static_dir);
    if (!d.http->start(d.config.api_bind->host, d.config.api_bind->port))
      throw Error(Errc::BindFailure, "cannot bind API on " + d.config.api_bind->host + ":" +
                                         std::to_string(d.config.api_bind->port));
  }
  json f = {{"port", d.bound_port}};
  if (d.http) f["api_port"] = d.http->port();
  d.events.write("listening", d.now(), f);
}

void Daemon::run() { impl_->run(); }
void Daemon::stop() { impl_->stopping = true; }
int Daemon::listen_port() const { return impl_->bound_port; }
int Daemon::api_port() const { return impl_->http ? impl_->http->port() : -1; }
bool Daemon::in_range() const { return impl_->in_range.load(); }

}  // namespace dtnl::daemon
