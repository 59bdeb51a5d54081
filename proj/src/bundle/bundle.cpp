// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/bundle/bundle.hpp"

#include <algorithm>
#include <cstring>

#include "dtnl/common/error.hpp"

namespace dtnl {

namespace {
constexpr std::uint8_t kHeaderBlockVersion = 1;
}

NodeId::NodeId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) throw Error(Errc::InvalidArgument, "node id must be nonempty");
  if (id_.size() > kMaxBytes) throw Error(Errc::InvalidArgument, "node id exceeds 64 bytes: " + id_);
}

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Rural: return "rural";
    case NodeRole::Mule: return "mule";
    case NodeRole::Urban: return "urban";
  }
  return "?";
}

std::optional<NodeRole> parse_role(std::string_view text) {
  if (text == "rural") return NodeRole::Rural;
  if (text == "mule") return NodeRole::Mule;
  if (text == "urban") return NodeRole::Urban;
  return std::nullopt;
}

const char* to_string(BundleKind kind) {
  switch (kind) {
    case BundleKind::TopicRequest: return "topic_request";
    case BundleKind::ContentUpdate: return "content_update";
    case BundleKind::ContentResponse: return "content_response";
  }
  return "?";
}

std::string to_hex(const BundleId& id) { return to_hex(ByteView(id)); }

std::optional<BundleId> bundle_id_from_hex(std::string_view hex) {
  Bytes raw;
  if (hex.size() != 64 || !from_hex(hex, raw)) return std::nullopt;
  BundleId id{};
  std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

BundleId compute_bundle_id(const NodeId& source, const NodeId& destination, Millis created_at,
                           const Digest& payload_digest) {
  ByteWriter w;
  w.str16(source.str());
  w.str16(destination.str());
  w.i64(created_at);
  w.raw(payload_digest);
  return sha256(w.bytes());
}

Bundle create_bundle(const NodeId& source, const NodeId& destination, BundleKind kind,
                     Priority priority, Bytes payload, Millis ttl, Millis now,
                     std::uint64_t max_payload) {
  if (ttl <= 0) throw Error(Errc::ZeroTtl, "bundle ttl must be positive");
  if (payload.size() > max_payload)
    throw Error(Errc::OversizePayload, "payload of " + std::to_string(payload.size()) +
                                           " bytes exceeds limit " + std::to_string(max_payload));
  if (payload.empty() && kind != BundleKind::TopicRequest)
    throw Error(Errc::EmptyPayload, "only topic requests may carry an empty payload");

  Bundle b;
  b.header.source = source;
  b.header.destination = destination;
  b.header.created_at = now;
  b.header.ttl = ttl;
  b.header.priority = priority;
  b.header.kind = kind;
  b.header.payload_len = payload.size();
  b.header.payload_digest = sha256(payload);
  b.header.id = compute_bundle_id(source, destination, now, b.header.payload_digest);
  b.payload = std::move(payload);
  return b;
}

// Header block layout (little-endian):
//   u32 block_len | u8 version | id[32] | str16 source | str16 destination |
//   i64 created_at | i64 ttl | u8 priority | u8 kind | u64 payload_len | digest[32]
Bytes encode_header_block(const BundleHeader& h) {
  ByteWriter w;
  w.u32(0);
  w.u8(kHeaderBlockVersion);
  w.raw(h.id);
  w.str16(h.source.str());
  w.str16(h.destination.str());
  w.i64(h.created_at);
  w.i64(h.ttl);
  w.u8(static_cast<std::uint8_t>(h.priority));
  w.u8(static_cast<std::uint8_t>(h.kind));
  w.u64(h.payload_len);
  w.raw(h.payload_digest);
  Bytes out = w.take();
  auto len = static_cast<std::uint32_t>(out.size());
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(len >> (8 * i));
  return out;
}

std::optional<DecodedHeader> decode_header_block(ByteView image) {
  ByteReader r(image);
  auto block_len = r.u32();
  if (!r.ok() || block_len < 4 || block_len > image.size() || block_len > 4096) return std::nullopt;
  ByteReader body(image.subspan(0, block_len));
  body.u32();
  if (body.u8() != kHeaderBlockVersion) return std::nullopt;
  DecodedHeader out;
  auto& h = out.header;
  auto id = body.raw(32);
  if (!body.ok()) return std::nullopt;
  std::copy(id.begin(), id.end(), h.id.begin());
  auto src = body.str16();
  auto dst = body.str16();
  h.created_at = body.i64();
  h.ttl = body.i64();
  auto prio = body.u8();
  auto kind = body.u8();
  h.payload_len = body.u64();
  auto digest = body.raw(32);
  if (!body.at_end()) return std::nullopt;
  if (prio > 1 || kind > 2 || src.empty() || dst.empty() || src.size() > NodeId::kMaxBytes ||
      dst.size() > NodeId::kMaxBytes)
    return std::nullopt;
  h.source = NodeId(std::move(src));
  h.destination = NodeId(std::move(dst));
  h.priority = static_cast<Priority>(prio);
  h.kind = static_cast<BundleKind>(kind);
  std::copy(digest.begin(), digest.end(), h.payload_digest.begin());
  out.block_len = block_len;
  return out;
}

Bytes encode_image(const Bundle& bundle) {
  Bytes out = encode_header_block(bundle.header);
  out.insert(out.end(), bundle.payload.begin(), bundle.payload.end());
  return out;
}

std::uint64_t image_length(const BundleHeader& header) {
  return encode_header_block(header).size() + header.payload_len;
}

std::optional<Bundle> decode_image(ByteView image) {
  auto decoded = decode_header_block(image);
  if (!decoded) return std::nullopt;
  const auto& h = decoded->header;
  if (image.size() - decoded->block_len != h.payload_len) return std::nullopt;
  auto payload = image.subspan(decoded->block_len);
  if (sha256(payload) != h.payload_digest) return std::nullopt;
  if (compute_bundle_id(h.source, h.destination, h.created_at, h.payload_digest) != h.id)
    return std::nullopt;
  return Bundle{h, Bytes(payload.begin(), payload.end())};
}

}  // namespace dtnl
