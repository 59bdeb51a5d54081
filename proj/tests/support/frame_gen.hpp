#pragma once

#include <random>

#include "dtnl/proto/messages.hpp"

namespace dtnl::testing {

inline BundleId random_id(std::mt19937_64& rng) {
  BundleId id;
  for (auto& b : id) b = static_cast<std::uint8_t>(rng());
  return id;
}

inline NodeId random_node(std::mt19937_64& rng) {
  std::string s;
  auto n = 1 + rng() % 20;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng() % 26));
  return NodeId(s);
}

/// A random well-formed frame of any type with a body its parser accepts.
inline proto::Frame random_valid_frame(std::mt19937_64& rng) {
  using namespace proto;
  switch (rng() % 7) {
    case 0: return make_beacon({random_node(rng), static_cast<NodeRole>(rng() % 3)});
    case 1: return make_hello({random_node(rng), static_cast<NodeRole>(rng() % 3)});
    case 2: {
      Manifest m;
      auto n = rng() % 5;
      for (std::size_t i = 0; i < n; ++i) {
        ManifestEntry e;
        e.id = random_id(rng);
        e.total_len = 1 + rng() % (1u << 26);
        e.destination = random_node(rng);
        e.kind = static_cast<BundleKind>(rng() % 3);
        e.priority = static_cast<Priority>(rng() % 2);
        e.complete = rng() % 2;
        std::uint64_t pos = 0;
        for (int k = 0; k < 3 && pos + 2 < e.total_len; ++k) {
          auto b = pos + 1 + rng() % ((e.total_len - pos) / 2 + 1);
          auto end = std::min(e.total_len, b + 1 + rng() % 1000);
          if (b >= end) break;
          e.ranges.add({b, end});
          pos = end;
        }
        m.entries.push_back(std::move(e));
      }
      return make_manifest(m);
    }
    case 3: {
      Want w;
      auto n = rng() % 6;
      for (std::size_t i = 0; i < n; ++i) w.entries.push_back({random_id(rng), rng()});
      return make_want(w);
    }
    case 4: {
      Bytes data(rng() % 4096);
      for (auto& b : data) b = static_cast<std::uint8_t>(rng());
      return make_chunk(random_id(rng), rng(), data);
    }
    case 5: return make_ack({random_id(rng), rng()});
    default: return make_bye({static_cast<std::uint8_t>(rng())});
  }
}

}  // namespace dtnl::testing
