// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace dtnl {

/// Half-open byte range [begin, end).
struct ByteRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  std::uint64_t size() const { return end - begin; }
  bool operator==(const ByteRange&) const = default;
};

/// Sorted, disjoint, coalesced set of byte ranges.
class RangeSet {
 public:
  RangeSet() = default;
  explicit RangeSet(std::vector<ByteRange> ranges);

  void add(ByteRange r);
  void clear() { ranges_.clear(); }

  bool contains(ByteRange r) const;
  bool covers(std::uint64_t total) const { return prefix_end() >= total; }
  /// End of the contiguous range starting at 0, or 0 if none.
  std::uint64_t prefix_end() const;
  std::uint64_t total_bytes() const;
  /// Keeps only [0, limit).
  void truncate(std::uint64_t limit);

  const std::vector<ByteRange>& ranges() const { return ranges_; }
  bool empty() const { return ranges_.empty(); }

  bool operator==(const RangeSet&) const = default;

 private:
  std::vector<ByteRange> ranges_;
};

}  // namespace dtnl
