// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dtnl/bundle/store.hpp"
#include "dtnl/proto/frame.hpp"
#include "dtnl/proto/plan.hpp"
#include "dtnl/routing/routing.hpp"

namespace dtnl::proto {

// Contact session state machine.
//
//   Idle --LinkUp/HELLO--> HelloSent --HELLO/MANIFEST--> Exchanging
//   Exchanging --BYE sent--> Closing --both BYE--> Done
//   any --LinkDown/timeout/violation--> Aborted
//
// After HELLO both sides send MANIFEST (offers for this peer + own partials),
// then WANT (accepted offers with resume offsets). Data flows one CHUNK per
// turn; the initiator takes the first turn. A turn is a CHUNK or a BYE; each
// CHUNK is answered by an ACK before the receiver takes its own turn.

struct SessionTimers {
  Millis hello_timeout = 3 * kSecond;
  Millis idle_timeout = 5 * kSecond;
};

struct HeldPartial {
  PartialMeta meta;
  RangeSet ranges;
};

/// Read-only snapshot of the local node, taken when the link comes up.
struct SessionEnv {
  routing::Peer self;
  const routing::RoleGraph* graph = nullptr;
  std::vector<OfferItem> offers;  // offer-queue order
  std::vector<HeldPartial> partials;
  std::set<BundleId> complete_ids;
  std::uint64_t free_quota = 0;
  std::uint64_t chunk_size = kDefaultChunkSize;
  bool initiator = false;
  SessionTimers timers;
  /// Reads bytes of a complete local bundle image.
  std::function<Bytes(const BundleId&, std::uint64_t offset, std::uint64_t len)> read_image;
};

enum class Phase { Idle, HelloSent, Exchanging, Closing, Done, Aborted };

const char* to_string(Phase p);

struct LinkUp {
  Millis now = 0;
};
struct LinkDown {
  Millis now = 0;
};
struct Tick {
  Millis now = 0;
};
struct FrameReceived {
  Frame frame;
  Millis now = 0;
};

using Event = std::variant<LinkUp, FrameReceived, LinkDown, Tick>;

struct SendFrame {
  Frame frame;
  bool operator==(const SendFrame&) const = default;
};
struct StoreChunk {
  PartialMeta meta;
  std::uint64_t offset = 0;
  Bytes data;
  bool operator==(const StoreChunk& o) const {
    return meta.id == o.meta.id && offset == o.offset && data == o.data;
  }
};
struct CompleteBundle {
  BundleId id{};
  bool operator==(const CompleteBundle&) const = default;
};
struct DeleteAfterCustody {
  BundleId id{};
  bool operator==(const DeleteAfterCustody&) const = default;
};
struct CloseLink {
  bool operator==(const CloseLink&) const = default;
};

using Action = std::variant<SendFrame, StoreChunk, CompleteBundle, DeleteAfterCustody, CloseLink>;

/// One-line rendering of an action, used for determinism checks and traces.
std::string describe(const Action& a);

struct OutgoingTransfer {
  BundleId id{};
  std::uint64_t total_len = 0;
  std::uint64_t start_offset = 0;
  std::uint64_t next_offset = 0;
  std::uint64_t acked = 0;
  bool released = false;
};

struct IncomingTransfer {
  PartialMeta meta;
  RangeSet ranges;
  bool completed = false;
};

struct SessionState {
  Phase phase = Phase::Idle;
  std::optional<routing::Peer> peer;
  std::vector<OfferItem> offers_to_peer;
  TransferPlan plan;  // from the peer's manifest, before WANT confirms it
  std::vector<OutgoingTransfer> outgoing;
  std::size_t cursor = 0;
  std::map<BundleId, IncomingTransfer> incoming;
  std::set<BundleId> completed_here;

  bool manifest_received = false;
  bool want_sent = false;
  bool want_received = false;
  bool awaiting_ack = false;
  bool sent_bye = false;
  bool peer_bye = false;

  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t chunk_bytes_sent = 0;
  std::uint64_t chunk_bytes_received = 0;
  /// Bytes exchanged before the first data-phase frame (discovery cost).
  std::uint64_t handshake_bytes = 0;
  std::uint64_t resumed_outgoing = 0;
  bool data_seen = false;

  Millis phase_since = 0;
  Millis last_rx = 0;
  std::string abort_reason;

  bool terminal() const { return phase == Phase::Done || phase == Phase::Aborted; }
};

struct StepResult {
  SessionState state;
  std::vector<Action> actions;
};

/// Pure transition function.
StepResult session_step(const SessionState& state, const Event& event, const SessionEnv& env);

/// DeleteAfterCustody iff the peer is the destination or the next hop toward it.
std::optional<Action> custody_handoff(const SessionState& state, const SessionEnv& env,
                                      const BundleId& acked_bundle_id);

/// Convenience owner of a state plus its environment.
class Session {
 public:
  explicit Session(SessionEnv env) : env_(std::move(env)) {}

  std::vector<Action> step(const Event& event) {
    auto r = session_step(state_, event, env_);
    state_ = std::move(r.state);
    return std::move(r.actions);
  }

  const SessionState& state() const { return state_; }
  const SessionEnv& env() const { return env_; }

 private:
  SessionEnv env_;
  SessionState state_;
};

}  // namespace dtnl::proto
