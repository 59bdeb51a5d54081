// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/bundle/range_set.hpp"

#include <algorithm>

namespace dtnl {

RangeSet::RangeSet(std::vector<ByteRange> ranges) {
  for (const auto& r : ranges) add(r);
}

void RangeSet::add(ByteRange r) {
  if (r.end <= r.begin) return;
  std::vector<ByteRange> out;
  out.reserve(ranges_.size() + 1);
  bool placed = false;
  for (const auto& cur : ranges_) {
    if (cur.end < r.begin) {
      out.push_back(cur);
    } else if (r.end < cur.begin) {
      if (!placed) {
        out.push_back(r);
        placed = true;
      }
      out.push_back(cur);
    } else {
      r.begin = std::min(r.begin, cur.begin);
      r.end = std::max(r.end, cur.end);
    }
  }
  if (!placed) out.push_back(r);
  ranges_ = std::move(out);
}

bool RangeSet::contains(ByteRange r) const {
  for (const auto& cur : ranges_)
    if (cur.begin <= r.begin && r.end <= cur.end) return true;
  return false;
}

std::uint64_t RangeSet::prefix_end() const {
  if (ranges_.empty() || ranges_.front().begin != 0) return 0;
  return ranges_.front().end;
}

std::uint64_t RangeSet::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& r : ranges_) n += r.size();
  return n;
}

void RangeSet::truncate(std::uint64_t limit) {
  std::vector<ByteRange> out;
  for (auto r : ranges_) {
    if (r.begin >= limit) break;
    r.end = std::min(r.end, limit);
    out.push_back(r);
  }
  ranges_ = std::move(out);
}

}  // namespace dtnl
