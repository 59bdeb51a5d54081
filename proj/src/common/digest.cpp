// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/digest.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <stdexcept>

namespace dtnl {

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("EVP sha256 init failed");
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(ByteView data) {
  if (!data.empty()) EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
  return *this;
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, out.data(), &len);
  return out;
}

Digest sha256(ByteView data) { return Sha256().update(data).finish(); }

std::uint32_t crc32(std::uint32_t running, ByteView data) {
  // zlib takes uInt lengths; feed large spans in pieces.
  uLong crc = running;
  std::size_t off = 0;
  while (off < data.size()) {
    auto n = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
    crc = ::crc32(crc, data.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32(ByteView data) { return crc32(0, data); }

}  // namespace dtnl
