// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dtnl {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string_view as_chars(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

/// Little-endian serializer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : out_(&out) {}

  void u8(std::uint8_t v) { buf().push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void raw(ByteView b) { buf().insert(buf().end(), b.begin(), b.end()); }
  /// u16 length prefix followed by the UTF-8 bytes.
  void str16(std::string_view s);

  Bytes& bytes() { return buf(); }
  Bytes take() { return std::move(buf()); }

 private:
  Bytes& buf() { return out_ ? *out_ : own_; }
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf().push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes own_;
  Bytes* out_ = nullptr;
};

/// Little-endian bounds-checked reader. Reads past the end set `ok()` false
/// and return zeros; callers check once at the end.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  ByteView raw(std::size_t n);
  std::string str16();

  bool ok() const { return ok_; }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return ok_ ? data_.size() - pos_ : 0; }
  bool at_end() const { return ok_ && pos_ == data_.size(); }

 private:
  std::uint64_t le(int n);

  ByteView data_;
  std::size_t pos_ = 0;
  bool ok_ = true;
};

std::string to_hex(ByteView b);
/// Returns false on odd length or non-hex characters.
bool from_hex(std::string_view hex, Bytes& out);

}  // namespace dtnl
