#include <doctest.h>

#include <random>

#include "dtnl/common/digest.hpp"
#include "dtnl/common/error.hpp"
#include "dtnl/proto/messages.hpp"
#include "support/frame_gen.hpp"

using namespace dtnl;
using namespace dtnl::proto;

TEST_CASE("beacon round trip") {
  auto f = make_beacon({NodeId("mule-1"), NodeRole::Mule});
  auto bytes = encode_frame(f);
  auto r = decode_frame(bytes);
  REQUIRE(r.status == DecodeStatus::Ok);
  CHECK(r.consumed == bytes.size());
  CHECK(r.frame == f);
  auto a = parse_announce(r.frame);
  REQUIRE(a);
  CHECK(a->node == NodeId("mule-1"));
  CHECK(a->role == NodeRole::Mule);
}

TEST_CASE("wire layout of a beacon is bit-exact") {
  auto bytes = encode_frame(make_beacon({NodeId("m"), NodeRole::Mule}));
  // DTLP, v1, type 0, len 4, body: u16 1, 'm', role 1
  Bytes head = {'D', 'T', 'L', 'P', 1, 0, 4, 0, 0, 0, 1, 0, 'm', 1};
  REQUIRE(bytes.size() == head.size() + 4);
  CHECK(Bytes(bytes.begin(), bytes.begin() + 14) == head);
  auto crc = crc32(head);
  CHECK(bytes[14] == (crc & 0xFF));
  CHECK(bytes[17] == (crc >> 24));
}

TEST_CASE("corruption and framing errors are typed") {
  auto bytes = encode_frame(make_chunk(BundleId{}, 0, Bytes(100, 7)));
  SUBCASE("flipped payload byte") {
    bytes[50] ^= 0x01;
    CHECK(decode_frame(bytes).status == DecodeStatus::BadCrc);
  }
  SUBCASE("truncated") {
    for (std::size_t n : {0, 3, 9, 10, 60, static_cast<int>(bytes.size()) - 1})
      CHECK(decode_frame(ByteView(bytes).first(n)).status == DecodeStatus::Truncated);
  }
  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK(decode_frame(bytes).status == DecodeStatus::BadMagic);
    CHECK(decode_frame(ByteView(bytes).first(1)).status == DecodeStatus::BadMagic);
  }
  SUBCASE("unknown version") {
    bytes[4] = 2;
    CHECK(decode_frame(bytes).status == DecodeStatus::UnknownVersion);
  }
  SUBCASE("unknown type") {
    bytes[5] = 9;
    CHECK(decode_frame(bytes).status == DecodeStatus::BadType);
  }
  SUBCASE("oversize length") {
    bytes[9] = 0x10;
    CHECK(decode_frame(bytes).status == DecodeStatus::BadLength);
  }
}

TEST_CASE("decode consumes exactly one frame and leaves the remainder") {
  auto a = encode_frame(make_ack({BundleId{}, 42}));
  auto b = encode_frame(make_bye({0}));
  Bytes stream = a;
  stream.insert(stream.end(), b.begin(), b.end());
  auto r1 = decode_frame(stream);
  REQUIRE(r1.status == DecodeStatus::Ok);
  CHECK(r1.consumed == a.size());
  auto r2 = decode_frame(ByteView(stream).subspan(r1.consumed));
  REQUIRE(r2.status == DecodeStatus::Ok);
  CHECK(r2.frame.type == FrameType::Bye);
}

TEST_CASE("oversized body is refused by the encoder") {
  Frame f{FrameType::Chunk, Bytes(kMaxBody + 1)};
  CHECK_THROWS_AS(encode_frame(f), Error);
}

TEST_CASE("1000 random valid frames round trip, typed bodies included") {
  std::mt19937_64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    auto f = dtnl::testing::random_valid_frame(rng);
    auto bytes = encode_frame(f);
    auto r = decode_frame(bytes);
    REQUIRE(r.status == DecodeStatus::Ok);
    CHECK(r.frame == f);
    CHECK(r.consumed == bytes.size());
    switch (f.type) {
      case FrameType::Manifest: CHECK(make_manifest(*parse_manifest(r.frame)) == f); break;
      case FrameType::Want: CHECK(make_want(*parse_want(r.frame)) == f); break;
      case FrameType::Chunk: {
        auto c = parse_chunk(r.frame);
        CHECK(make_chunk(c->id, c->offset, c->data) == f);
        break;
      }
      case FrameType::Ack: CHECK(make_ack(*parse_ack(r.frame)) == f); break;
      case FrameType::Bye: CHECK(make_bye(*parse_bye(r.frame)) == f); break;
      default: CHECK(parse_announce(r.frame).has_value()); break;
    }
  }
}

TEST_CASE("malformed typed bodies are rejected") {
  CHECK_FALSE(parse_announce({FrameType::Hello, {0, 0, 1}}));
  CHECK_FALSE(parse_announce({FrameType::Hello, {1, 0, 'a', 7}}));
  CHECK_FALSE(parse_manifest({FrameType::Manifest, {5, 0, 0, 0}}));
  CHECK_FALSE(parse_want({FrameType::Want, {1, 0, 0, 0, 1, 2}}));
  CHECK_FALSE(parse_ack({FrameType::Ack, Bytes(41)}));
  CHECK_FALSE(parse_bye({FrameType::Bye, {}}));
  CHECK_FALSE(parse_chunk({FrameType::Ack, Bytes(40)}));
}
