// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "dtnl/common/bytes.hpp"

namespace dtnl {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  Sha256& update(ByteView data);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Digest sha256(ByteView data);

std::uint32_t crc32(ByteView data);
std::uint32_t crc32(std::uint32_t running, ByteView data);

}  // namespace dtnl
