// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "dtnl/bundle/bundle.hpp"
#include "dtnl/bundle/range_set.hpp"
#include "dtnl/proto/frame.hpp"

namespace dtnl::proto {

/// BEACON and HELLO bodies: str16 node id, u8 role.
struct NodeAnnounce {
  NodeId node;
  NodeRole role = NodeRole::Rural;

  bool operator==(const NodeAnnounce&) const = default;
};

struct ManifestEntry {
  BundleId id{};
  std::uint64_t total_len = 0;
  NodeId destination;
  BundleKind kind = BundleKind::ContentUpdate;
  Priority priority = Priority::Content;
  bool complete = false;
  RangeSet ranges;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  bool operator==(const Manifest&) const = default;
};

struct WantEntry {
  BundleId id{};
  std::uint64_t start_offset = 0;
  bool operator==(const WantEntry&) const = default;
};

struct Want {
  std::vector<WantEntry> entries;
  bool operator==(const Want&) const = default;
};

struct Chunk {
  BundleId id{};
  std::uint64_t offset = 0;
  Bytes data;
  bool operator==(const Chunk&) const = default;
};

struct Ack {
  BundleId id{};
  /// Image bytes [0, end) of this bundle are stored at the receiver.
  std::uint64_t end = 0;
  bool operator==(const Ack&) const = default;
};

struct Bye {
  std::uint8_t reason = 0;
  bool operator==(const Bye&) const = default;
};

Frame make_beacon(const NodeAnnounce& a);
Frame make_hello(const NodeAnnounce& a);
Frame make_manifest(const Manifest& m);
Frame make_want(const Want& w);
Frame make_chunk(const BundleId& id, std::uint64_t offset, ByteView data);
Frame make_ack(const Ack& a);
Frame make_bye(const Bye& b);

/// Each parser returns nullopt when the frame type differs or the body is malformed.
std::optional<NodeAnnounce> parse_announce(const Frame& f);
std::optional<Manifest> parse_manifest(const Frame& f);
std::optional<Want> parse_want(const Frame& f);
std::optional<Chunk> parse_chunk(const Frame& f);
std::optional<Ack> parse_ack(const Frame& f);
std::optional<Bye> parse_bye(const Frame& f);

}  // namespace dtnl::proto
