// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/proto/messages.hpp"

#include <algorithm>

#include "dtnl/common/error.hpp"

namespace dtnl::proto {

namespace {

void put_id(ByteWriter& w, const BundleId& id) { w.raw(id); }

bool get_id(ByteReader& r, BundleId& id) {
  auto raw = r.raw(32);
  if (!r.ok()) return false;
  std::copy(raw.begin(), raw.end(), id.begin());
  return true;
}

std::optional<NodeId> get_node(ByteReader& r) {
  auto s = r.str16();
  if (!r.ok() || s.empty() || s.size() > NodeId::kMaxBytes) return std::nullopt;
  return NodeId(std::move(s));
}

Frame announce_frame(FrameType type, const NodeAnnounce& a) {
  ByteWriter w;
  w.str16(a.node.str());
  w.u8(static_cast<std::uint8_t>(a.role));
  return {type, w.take()};
}

}  // namespace

Frame make_beacon(const NodeAnnounce& a) { return announce_frame(FrameType::Beacon, a); }
Frame make_hello(const NodeAnnounce& a) { return announce_frame(FrameType::Hello, a); }

Frame make_manifest(const Manifest& m) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(m.entries.size()));
  for (const auto& e : m.entries) {
    put_id(w, e.id);
    w.u64(e.total_len);
    w.str16(e.destination.str());
    w.u8(static_cast<std::uint8_t>(e.kind));
    w.u8(static_cast<std::uint8_t>(e.priority));
    w.u8(e.complete ? 1 : 0);
    const auto& ranges = e.ranges.ranges();
    if (ranges.size() > 0xFFFF) throw Error(Errc::InvalidArgument, "too many ranges in manifest entry");
    w.u16(static_cast<std::uint16_t>(ranges.size()));
    for (const auto& r : ranges) {
      w.u64(r.begin);
      w.u64(r.end);
    }
  }
  return {FrameType::Manifest, w.take()};
}

Frame make_want(const Want& want) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(want.entries.size()));
  for (const auto& e : want.entries) {
    put_id(w, e.id);
    w.u64(e.start_offset);
  }
  return {FrameType::Want, w.take()};
}

Frame make_chunk(const BundleId& id, std::uint64_t offset, ByteView data) {
  Bytes body;
  body.reserve(40 + data.size());
  ByteWriter w(body);
  put_id(w, id);
  w.u64(offset);
  w.raw(data);
  return {FrameType::Chunk, std::move(body)};
}

Frame make_ack(const Ack& a) {
  ByteWriter w;
  put_id(w, a.id);
  w.u64(a.end);
  return {FrameType::Ack, w.take()};
}

Frame make_bye(const Bye& b) {
  ByteWriter w;
  w.u8(b.reason);
  return {FrameType::Bye, w.take()};
}

std::optional<NodeAnnounce> parse_announce(const Frame& f) {
  if (f.type != FrameType::Beacon && f.type != FrameType::Hello) return std::nullopt;
  ByteReader r(f.body);
  auto node = get_node(r);
  auto role = r.u8();
  if (!node || !r.at_end() || role > 2) return std::nullopt;
  return NodeAnnounce{*node, static_cast<NodeRole>(role)};
}

std::optional<Manifest> parse_manifest(const Frame& f) {
  if (f.type != FrameType::Manifest) return std::nullopt;
  ByteReader r(f.body);
  auto count = r.u32();
  if (!r.ok() || count > f.body.size() / 47) return std::nullopt;  // 47 = minimal entry size
  Manifest m;
  m.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ManifestEntry e;
    if (!get_id(r, e.id)) return std::nullopt;
    e.total_len = r.u64();
    auto dest = get_node(r);
    auto kind = r.u8();
    auto prio = r.u8();
    auto complete = r.u8();
    auto nranges = r.u16();
    if (!dest || !r.ok() || kind > 2 || prio > 1 || complete > 1) return std::nullopt;
    e.destination = *dest;
    e.kind = static_cast<BundleKind>(kind);
    e.priority = static_cast<Priority>(prio);
    e.complete = complete == 1;
    std::uint64_t last_end = 0;
    for (std::uint16_t k = 0; k < nranges; ++k) {
      ByteRange br{r.u64(), r.u64()};
      if (!r.ok() || br.end <= br.begin || br.end > e.total_len || (k > 0 && br.begin <= last_end))
        return std::nullopt;
      last_end = br.end;
      e.ranges.add(br);
    }
    m.entries.push_back(std::move(e));
  }
  if (!r.at_end()) return std::nullopt;
  return m;
}

std::optional<Want> parse_want(const Frame& f) {
  if (f.type != FrameType::Want) return std::nullopt;
  ByteReader r(f.body);
  auto count = r.u32();
  if (!r.ok() || count > f.body.size() / 40) return std::nullopt;
  Want w;
  w.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    WantEntry e;
    if (!get_id(r, e.id)) return std::nullopt;
    e.start_offset = r.u64();
    w.entries.push_back(e);
  }
  if (!r.at_end()) return std::nullopt;
  return w;
}

std::optional<Chunk> parse_chunk(const Frame& f) {
  if (f.type != FrameType::Chunk) return std::nullopt;
  ByteReader r(f.body);
  Chunk c;
  if (!get_id(r, c.id)) return std::nullopt;
  c.offset = r.u64();
  if (!r.ok()) return std::nullopt;
  auto data = r.raw(r.remaining());
  c.data.assign(data.begin(), data.end());
  return c;
}

std::optional<Ack> parse_ack(const Frame& f) {
  if (f.type != FrameType::Ack) return std::nullopt;
  ByteReader r(f.body);
  Ack a;
  if (!get_id(r, a.id)) return std::nullopt;
  a.end = r.u64();
  if (!r.at_end()) return std::nullopt;
  return a;
}

std::optional<Bye> parse_bye(const Frame& f) {
  if (f.type != FrameType::Bye) return std::nullopt;
  ByteReader r(f.body);
  Bye b{r.u8()};
  if (!r.at_end()) return std::nullopt;
  return b;
}

}  // namespace dtnl::proto
