// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "dtnl/common/bytes.hpp"

namespace dtnl::proto {

//  magic "DTLP" | u8 version | u8 type | u32 body length (LE) | body | u32 CRC32
//  CRC32 covers the 10 header bytes and the body.
inline constexpr std::array<std::uint8_t, 4> kMagic = {'D', 'T', 'L', 'P'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderLen = 10;
inline constexpr std::size_t kTrailerLen = 4;
inline constexpr std::size_t kFrameOverhead = kHeaderLen + kTrailerLen;
inline constexpr std::uint32_t kMaxBody = 1u << 20;

enum class FrameType : std::uint8_t {
  Beacon = 0,
  Hello = 1,
  Manifest = 2,
  Want = 3,
  Chunk = 4,
  Ack = 5,
  Bye = 6,
};

const char* to_string(FrameType t);

struct Frame {
  FrameType type = FrameType::Beacon;
  Bytes body;

  bool operator==(const Frame&) const = default;
};

/// Throws dtnl::Error(InvalidArgument) if the body exceeds kMaxBody.
Bytes encode_frame(const Frame& frame);
std::size_t encoded_size(const Frame& frame);

enum class DecodeStatus {
  Ok,
  Truncated,       // need more bytes; not an error
  BadMagic,
  UnknownVersion,
  BadType,
  BadLength,
  BadCrc,
};

const char* to_string(DecodeStatus s);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Truncated;
  Frame frame;
  /// Bytes consumed on Ok; 0 otherwise.
  std::size_t consumed = 0;
};

/// Decodes one frame from the front of `data`. Never throws.
DecodeResult decode_frame(ByteView data);

}  // namespace dtnl::proto
