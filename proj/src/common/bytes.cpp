// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/bytes.hpp"

#include <stdexcept>

namespace dtnl {

void ByteWriter::str16(std::string_view s) {
  if (s.size() > 0xFFFF) throw std::length_error("string exceeds u16 length prefix");
  u16(static_cast<std::uint16_t>(s.size()));
  raw(as_bytes(s));
}

std::uint64_t ByteReader::le(int n) {
  if (!ok_ || data_.size() - pos_ < static_cast<std::size_t>(n)) {
    ok_ = false;
    return 0;
  }
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += n;
  return v;
}

ByteView ByteReader::raw(std::size_t n) {
  if (!ok_ || data_.size() - pos_ < n) {
    ok_ = false;
    return {};
  }
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str16() {
  auto n = u16();
  auto b = raw(n);
  return std::string(as_chars(b));
}

std::string to_hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

bool from_hex(std::string_view hex, Bytes& out) {
  if (hex.size() % 2 != 0) return false;
  Bytes result;
  result.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return false;
    result.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  out = std::move(result);
  return true;
}

}  // namespace dtnl
