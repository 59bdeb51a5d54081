// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dtnl/common/bytes.hpp"
#include "dtnl/common/digest.hpp"
#include "dtnl/common/time.hpp"

namespace dtnl {

/// Node identifier: nonempty UTF-8, at most 64 bytes.
class NodeId {
 public:
  static constexpr std::size_t kMaxBytes = 64;

  NodeId() = default;
  explicit NodeId(std::string id);

  const std::string& str() const { return id_; }
  bool empty() const { return id_.empty(); }

  auto operator<=>(const NodeId&) const = default;

 private:
  std::string id_;
};

enum class NodeRole : std::uint8_t { Rural = 0, Mule = 1, Urban = 2 };

const char* to_string(NodeRole role);
std::optional<NodeRole> parse_role(std::string_view text);

/// Control outranks Content in every ordering.
enum class Priority : std::uint8_t { Content = 0, Control = 1 };

enum class BundleKind : std::uint8_t { TopicRequest = 0, ContentUpdate = 1, ContentResponse = 2 };

const char* to_string(BundleKind kind);

using BundleId = std::array<std::uint8_t, 32>;

std::string to_hex(const BundleId& id);
std::optional<BundleId> bundle_id_from_hex(std::string_view hex);

struct BundleHeader {
  BundleId id{};
  NodeId source;
  NodeId destination;
  Millis created_at = 0;
  Millis ttl = 0;
  Priority priority = Priority::Content;
  BundleKind kind = BundleKind::ContentUpdate;
  std::uint64_t payload_len = 0;
  Digest payload_digest{};

  Millis expires_at() const { return created_at + ttl; }
  bool expired(Millis now) const { return now >= expires_at(); }

  bool operator==(const BundleHeader&) const = default;
};

struct Bundle {
  BundleHeader header;
  Bytes payload;

  bool operator==(const Bundle&) const = default;
};

inline constexpr Millis kDefaultBundleTtl = 7 * kDay;
inline constexpr std::uint64_t kDefaultMaxPayload = 64ull << 20;

/// SHA-256 over (str16 source, str16 destination, i64 created_at, payload digest).
BundleId compute_bundle_id(const NodeId& source, const NodeId& destination, Millis created_at,
                           const Digest& payload_digest);

Bundle create_bundle(const NodeId& source, const NodeId& destination, BundleKind kind,
                     Priority priority, Bytes payload, Millis ttl, Millis now,
                     std::uint64_t max_payload = kDefaultMaxPayload);

/// A bundle's transfer/storage form: encoded header block, then the payload.
/// Chunk offsets on the wire and in the store refer to positions in the image.
Bytes encode_header_block(const BundleHeader& header);

struct DecodedHeader {
  BundleHeader header;
  std::size_t block_len = 0;
};

/// Parses a header block from the front of `image`. Returns nullopt if the
/// block is truncated or malformed.
std::optional<DecodedHeader> decode_header_block(ByteView image);

Bytes encode_image(const Bundle& bundle);
std::uint64_t image_length(const BundleHeader& header);

/// Parses and fully verifies an image (lengths, payload digest, id).
std::optional<Bundle> decode_image(ByteView image);

}  // namespace dtnl

template <>
struct std::hash<dtnl::NodeId> {
  std::size_t operator()(const dtnl::NodeId& n) const noexcept {
    return std::hash<std::string>{}(n.str());
  }
};
