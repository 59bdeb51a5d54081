// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/proto/session.hpp"

#include <algorithm>

#include "dtnl/common/digest.hpp"
#include "dtnl/proto/messages.hpp"

namespace dtnl::proto {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "Idle";
    case Phase::HelloSent: return "HelloSent";
    case Phase::Exchanging: return "Exchanging";
    case Phase::Closing: return "Closing";
    case Phase::Done: return "Done";
    case Phase::Aborted: return "Aborted";
  }
  return "?";
}

std::string describe(const Action& a) {
  struct V {
    std::string operator()(const SendFrame& s) const {
      auto bytes = encode_frame(s.frame);
      return std::string("send ") + to_string(s.frame.type) + " len=" + std::to_string(bytes.size()) +
             " crc=" + std::to_string(crc32(bytes));
    }
    std::string operator()(const StoreChunk& s) const {
      return "store " + to_hex(s.meta.id).substr(0, 16) + " @" + std::to_string(s.offset) + " +" +
             std::to_string(s.data.size()) + " crc=" + std::to_string(crc32(s.data));
    }
    std::string operator()(const CompleteBundle& c) const { return "complete " + to_hex(c.id).substr(0, 16); }
    std::string operator()(const DeleteAfterCustody& d) const { return "delete " + to_hex(d.id).substr(0, 16); }
    std::string operator()(const CloseLink&) const { return "close"; }
  };
  return std::visit(V{}, a);
}

std::optional<Action> custody_handoff(const SessionState& state, const SessionEnv& env,
                                      const BundleId& acked_bundle_id) {
  if (!state.peer || !env.graph) return std::nullopt;
  auto it = std::find_if(state.offers_to_peer.begin(), state.offers_to_peer.end(),
                         [&](const OfferItem& o) { return o.id == acked_bundle_id; });
  if (it == state.offers_to_peer.end()) return std::nullopt;
  if (env.graph->is_next_hop(env.self, *state.peer, it->destination)) return DeleteAfterCustody{acked_bundle_id};
  return std::nullopt;
}

namespace {

class Stepper {
 public:
  Stepper(const SessionState& s, const SessionEnv& env) : s_(s), env_(env) {}

  StepResult run(const Event& event) {
    try {
      std::visit([this](const auto& e) { handle(e); }, event);
    } catch (const std::exception& ex) {
      // A failed local read (e.g. image vanished) ends the contact; partial
      // state already emitted stays valid.
      if (!s_.terminal()) abort(std::string("local failure: ") + ex.what(), true);
    }
    return {std::move(s_), std::move(actions_)};
  }

 private:
  void handle(const LinkUp& e) {
    now_ = e.now;
    if (s_.phase != Phase::Idle) return violation("LinkUp outside Idle");
    s_.last_rx = e.now;
    send(make_hello({env_.self.id, env_.self.role}));
    enter(Phase::HelloSent);
  }

  void handle(const LinkDown& e) {
    now_ = e.now;
    if (s_.terminal()) return;
    abort("link down", false);
  }

  void handle(const Tick& e) {
    now_ = e.now;
    if (s_.phase == Phase::HelloSent && e.now - s_.phase_since >= env_.timers.hello_timeout)
      return abort("hello timeout", true);
    if ((s_.phase == Phase::Exchanging || s_.phase == Phase::Closing) &&
        e.now - s_.last_rx >= env_.timers.idle_timeout)
      return abort("idle timeout", true);
  }

  void handle(const FrameReceived& e) {
    now_ = e.now;
    if (s_.terminal()) return;
    const auto n = encoded_size(e.frame);
    s_.bytes_received += n;
    if (!data_started() && e.frame.type != FrameType::Chunk && e.frame.type != FrameType::Bye)
      s_.handshake_bytes += n;
    s_.last_rx = e.now;
    switch (e.frame.type) {
      case FrameType::Hello: return on_hello(e.frame);
      case FrameType::Manifest: return on_manifest(e.frame);
      case FrameType::Want: return on_want(e.frame);
      case FrameType::Chunk: return on_chunk(e.frame);
      case FrameType::Ack: return on_ack(e.frame);
      case FrameType::Bye: return on_bye(e.frame);
      case FrameType::Beacon: return violation("BEACON on a session link");
    }
    violation("unknown frame type");
  }

  void on_hello(const Frame& f) {
    if (s_.phase != Phase::HelloSent) return violation("HELLO in phase " + std::string(to_string(s_.phase)));
    auto hello = parse_announce(f);
    if (!hello) return violation("malformed HELLO");
    if (hello->node == env_.self.id) return violation("peer claims our own id");
    s_.peer = routing::Peer{hello->node, hello->role};

    Manifest m;
    for (const auto& offer : env_.offers) {
      routing::BundleMeta meta{offer.id, offer.source, offer.destination, offer.total_len};
      if (!env_.graph || !routing::should_offer(meta, env_.self, *s_.peer, *env_.graph)) continue;
      s_.offers_to_peer.push_back(offer);
      m.entries.push_back({offer.id, offer.total_len, offer.destination, offer.kind, offer.priority, true,
                           RangeSet({{0, offer.total_len}})});
    }
    for (const auto& p : env_.partials)
      m.entries.push_back({p.meta.id, p.meta.total_len, p.meta.destination, p.meta.kind, p.meta.priority, false,
                           p.ranges});
    send(make_manifest(m));
    enter(Phase::Exchanging);
  }

  void on_manifest(const Frame& f) {
    if (s_.phase != Phase::Exchanging || s_.manifest_received) return violation("unexpected MANIFEST");
    auto m = parse_manifest(f);
    if (!m) return violation("malformed MANIFEST");
    s_.manifest_received = true;

    std::vector<PeerHolding> holdings;
    holdings.reserve(m->entries.size());
    for (const auto& e : m->entries) holdings.push_back({e.id, e.complete, e.ranges});
    s_.plan = plan_transfer(s_.offers_to_peer, holdings, nullptr);

    Want want;
    std::uint64_t quota = env_.free_quota;
    for (const auto& e : m->entries) {
      if (!e.complete) continue;  // the peer's own partials are not offers
      if (e.total_len == 0) return violation("zero-length offer");
      PartialMeta meta{e.id, e.total_len, e.destination, e.kind, e.priority};
      auto held = std::find_if(env_.partials.begin(), env_.partials.end(),
                               [&](const HeldPartial& p) { return p.meta.id == e.id; });
      if (held != env_.partials.end()) {
        // Space was reserved when the partial was first created.
        RangeSet ranges = held->ranges;
        std::uint64_t start = ranges.prefix_end();
        start -= start % env_.chunk_size;
        if (start >= e.total_len) start = 0;
        ranges.truncate(start);
        s_.incoming[e.id] = {meta, ranges, false};
        want.entries.push_back({e.id, start});
        continue;
      }
      routing::BundleMeta bm{e.id, NodeId{}, e.destination, e.total_len};
      auto decision = routing::accept_offer(bm, env_.self.role, quota, env_.complete_ids.count(e.id) != 0);
      switch (decision) {
        case routing::OfferDecision::Accept:
          quota -= e.total_len;
          s_.incoming[e.id] = {meta, RangeSet{}, false};
          want.entries.push_back({e.id, 0});
          break;
        case routing::OfferDecision::RejectDuplicate:
          want.entries.push_back({e.id, e.total_len});
          break;
        case routing::OfferDecision::RejectQuota:
          break;
      }
    }
    send(make_want(want));
    s_.want_sent = true;
    if (s_.want_received && env_.initiator) take_turn();
  }

  void on_want(const Frame& f) {
    if (s_.phase != Phase::Exchanging || s_.want_received) return violation("unexpected WANT");
    auto w = parse_want(f);
    if (!w) return violation("malformed WANT");
    s_.want_received = true;

    std::map<BundleId, std::uint64_t> starts;
    for (const auto& e : w->entries) {
      auto it = std::find_if(s_.offers_to_peer.begin(), s_.offers_to_peer.end(),
                             [&](const OfferItem& o) { return o.id == e.id; });
      if (it == s_.offers_to_peer.end()) return violation("WANT for a bundle that was not offered");
      if (e.start_offset > it->total_len || (e.start_offset < it->total_len && e.start_offset % env_.chunk_size))
        return violation("WANT offset not on the chunk grid");
      starts[e.id] = e.start_offset;
    }
    for (const auto& offer : s_.offers_to_peer) {
      auto it = starts.find(offer.id);
      if (it == starts.end()) continue;
      if (it->second == offer.total_len) {
        // Peer already holds it complete: same as a full ACK.
        if (auto a = custody_handoff(s_, env_, offer.id)) actions_.push_back(*a);
        continue;
      }
      OutgoingTransfer t;
      t.id = offer.id;
      t.total_len = offer.total_len;
      t.start_offset = t.next_offset = t.acked = it->second;
      if (t.start_offset > 0) ++s_.resumed_outgoing;
      s_.outgoing.push_back(t);
    }
    if (s_.want_sent && env_.initiator) take_turn();
  }

  void on_chunk(const Frame& f) {
    if (!in_data_phase()) return violation("CHUNK before WANT exchange");
    auto c = parse_chunk(f);
    if (!c) return violation("malformed CHUNK");
    auto it = s_.incoming.find(c->id);
    if (it == s_.incoming.end()) return violation("CHUNK for a bundle not wanted");
    auto& in = it->second;
    if (in.completed) return violation("CHUNK after completion");
    const auto total = in.meta.total_len;
    const auto expected = c->offset < total ? std::min(env_.chunk_size, total - c->offset) : 0;
    if (c->offset % env_.chunk_size != 0 || expected == 0 || c->data.size() != expected)
      return violation("CHUNK off the chunk grid");
    s_.data_seen = true;
    s_.chunk_bytes_received += c->data.size();
    if (!in.ranges.contains({c->offset, c->offset + c->data.size()})) {
      actions_.push_back(StoreChunk{in.meta, c->offset, std::move(c->data)});
      in.ranges.add({c->offset, c->offset + expected});
    }
    if (in.ranges.covers(total)) {
      in.completed = true;
      s_.completed_here.insert(c->id);
      actions_.push_back(CompleteBundle{c->id});
    }
    send(make_ack({c->id, in.ranges.prefix_end()}));
    take_turn();
  }

  void on_ack(const Frame& f) {
    if (!in_data_phase() || !s_.awaiting_ack) return violation("unexpected ACK");
    auto a = parse_ack(f);
    if (!a) return violation("malformed ACK");
    auto& out = s_.outgoing.at(s_.cursor);
    if (a->id != out.id || a->end != out.next_offset) return violation("ACK does not match the chunk in flight");
    out.acked = a->end;
    s_.awaiting_ack = false;
    if (out.acked == out.total_len) {
      out.released = true;
      if (auto action = custody_handoff(s_, env_, out.id)) actions_.push_back(*action);
      ++s_.cursor;
    }
    if (s_.peer_bye) take_turn();
  }

  void on_bye(const Frame& f) {
    if (!in_data_phase() || s_.peer_bye || s_.awaiting_ack) return violation("unexpected BYE");
    if (!parse_bye(f)) return violation("malformed BYE");
    s_.data_seen = true;
    s_.peer_bye = true;
    take_turn();
  }

  void take_turn() {
    if (s_.awaiting_ack || s_.terminal()) return;
    if (s_.cursor < s_.outgoing.size()) {
      auto& out = s_.outgoing[s_.cursor];
      const auto len = std::min(env_.chunk_size, out.total_len - out.next_offset);
      Bytes data = env_.read_image(out.id, out.next_offset, len);
      if (data.size() != len) return abort("short local read", true);
      s_.data_seen = true;
      send(make_chunk(out.id, out.next_offset, data));
      s_.chunk_bytes_sent += len;
      out.next_offset += len;
      s_.awaiting_ack = true;
      return;
    }
    if (!s_.sent_bye) {
      s_.data_seen = true;
      send(make_bye({0}));
      s_.sent_bye = true;
      enter(Phase::Closing);
    }
    if (s_.sent_bye && s_.peer_bye) {
      enter(Phase::Done);
      actions_.push_back(CloseLink{});
    }
  }

  bool in_data_phase() const {
    return (s_.phase == Phase::Exchanging || s_.phase == Phase::Closing) && s_.want_sent && s_.want_received;
  }
  bool data_started() const { return s_.data_seen; }

  void send(Frame f) {
    const auto n = encoded_size(f);
    s_.bytes_sent += n;
    if (!data_started() && f.type != FrameType::Chunk && f.type != FrameType::Bye) s_.handshake_bytes += n;
    actions_.push_back(SendFrame{std::move(f)});
  }

  void enter(Phase p) {
    s_.phase = p;
    s_.phase_since = now_;
  }

  void abort(std::string reason, bool close) {
    enter(Phase::Aborted);
    s_.abort_reason = std::move(reason);
    if (close) actions_.push_back(CloseLink{});
  }

  void violation(const std::string& why) { abort("protocol violation: " + why, true); }

  SessionState s_;
  const SessionEnv& env_;
  std::vector<Action> actions_;
  Millis now_ = 0;
};

}  // namespace

StepResult session_step(const SessionState& state, const Event& event, const SessionEnv& env) {
  return Stepper(state, env).run(event);
}

}  // namespace dtnl::proto
