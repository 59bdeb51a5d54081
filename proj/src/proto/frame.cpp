// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/proto/frame.hpp"

#include <algorithm>

#include "dtnl/common/digest.hpp"
#include "dtnl/common/error.hpp"

namespace dtnl::proto {

const char* to_string(FrameType t) {
  switch (t) {
    case FrameType::Beacon: return "BEACON";
    case FrameType::Hello: return "HELLO";
    case FrameType::Manifest: return "MANIFEST";
    case FrameType::Want: return "WANT";
    case FrameType::Chunk: return "CHUNK";
    case FrameType::Ack: return "ACK";
    case FrameType::Bye: return "BYE";
  }
  return "?";
}

const char* to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Ok: return "Ok";
    case DecodeStatus::Truncated: return "Truncated";
    case DecodeStatus::BadMagic: return "BadMagic";
    case DecodeStatus::UnknownVersion: return "UnknownVersion";
    case DecodeStatus::BadType: return "BadType";
    case DecodeStatus::BadLength: return "BadLength";
    case DecodeStatus::BadCrc: return "BadCrc";
  }
  return "?";
}

Bytes encode_frame(const Frame& frame) {
  if (frame.body.size() > kMaxBody)
    throw Error(Errc::InvalidArgument, "frame body exceeds 1 MiB");
  Bytes out;
  out.reserve(kFrameOverhead + frame.body.size());
  ByteWriter w(out);
  for (const auto b : kMagic) w.u8(b);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(frame.type));
  w.u32(static_cast<std::uint32_t>(frame.body.size()));
  w.raw(frame.body);
  w.u32(crc32(out));
  return out;
}

std::size_t encoded_size(const Frame& frame) { return kFrameOverhead + frame.body.size(); }

DecodeResult decode_frame(ByteView data) {
  DecodeResult r;
  // Reject a wrong magic as soon as the available prefix disagrees.
  const auto magic_seen = std::min(data.size(), kMagic.size());
  if (!std::equal(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(magic_seen), kMagic.begin())) {
    r.status = DecodeStatus::BadMagic;
    return r;
  }
  if (data.size() < kHeaderLen) {
    r.status = data.size() > 4 && data[4] != kVersion ? DecodeStatus::UnknownVersion : DecodeStatus::Truncated;
    return r;
  }
  ByteReader hdr(data.subspan(4, kHeaderLen - 4));
  auto version = hdr.u8();
  auto type = hdr.u8();
  auto len = hdr.u32();
  if (version != kVersion) {
    r.status = DecodeStatus::UnknownVersion;
    return r;
  }
  if (type > static_cast<std::uint8_t>(FrameType::Bye)) {
    r.status = DecodeStatus::BadType;
    return r;
  }
  if (len > kMaxBody) {
    r.status = DecodeStatus::BadLength;
    return r;
  }
  const std::size_t total = kFrameOverhead + len;
  if (data.size() < total) {
    r.status = DecodeStatus::Truncated;
    return r;
  }
  ByteReader tail(data.subspan(kHeaderLen + len, kTrailerLen));
  if (tail.u32() != crc32(data.first(kHeaderLen + len))) {
    r.status = DecodeStatus::BadCrc;
    return r;
  }
  r.status = DecodeStatus::Ok;
  r.frame.type = static_cast<FrameType>(type);
  r.frame.body.assign(data.begin() + kHeaderLen, data.begin() + static_cast<std::ptrdiff_t>(kHeaderLen + len));
  r.consumed = total;
  return r;
}

}  // namespace dtnl::proto
