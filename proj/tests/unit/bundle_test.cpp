#include <doctest.h>

#include "dtnl/bundle/bundle.hpp"
#include "dtnl/bundle/range_set.hpp"
#include "dtnl/common/error.hpp"

using namespace dtnl;

namespace {
Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }
constexpr Millis kT = 1'700'000'000'000;
}  // namespace

TEST_CASE("create_bundle is deterministic and its id recomputes from fields") {
  auto a = create_bundle(NodeId("rural-1"), NodeId("urban-1"), BundleKind::TopicRequest, Priority::Control,
                         text("algebra"), 24 * kHour, kT);
  auto b = create_bundle(NodeId("rural-1"), NodeId("urban-1"), BundleKind::TopicRequest, Priority::Control,
                         text("algebra"), 24 * kHour, kT);
  CHECK(a == b);
  CHECK(encode_image(a) == encode_image(b));

  // Independent recomputation of the preimage.
  ByteWriter w;
  w.u16(7);
  w.raw(as_bytes("rural-1"));
  w.u16(7);
  w.raw(as_bytes("urban-1"));
  w.i64(kT);
  w.raw(sha256(text("algebra")));
  CHECK(a.header.id == sha256(w.bytes()));
  CHECK(a.header.payload_len == 7);

  auto c = create_bundle(NodeId("rural-1"), NodeId("urban-1"), BundleKind::TopicRequest, Priority::Control,
                         text("algebra"), 24 * kHour, kT + 1);
  CHECK(c.header.id != a.header.id);
}

TEST_CASE("a 30 MiB content response keeps its exact length") {
  Bytes payload(30u << 20, 'x');
  auto b = create_bundle(NodeId("urban-1"), NodeId("rural-1"), BundleKind::ContentResponse, Priority::Content,
                         std::move(payload), kDefaultBundleTtl, kT);
  CHECK(b.header.payload_len == 31'457'280);
  CHECK(b.payload.size() == 31'457'280);
}

TEST_CASE("create_bundle preconditions") {
  auto make = [](Bytes p, Millis ttl, BundleKind kind = BundleKind::ContentUpdate, std::uint64_t max = kDefaultMaxPayload) {
    return create_bundle(NodeId("a"), NodeId("b"), kind, Priority::Content, std::move(p), ttl, kT, max);
  };
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected an error");
    return Errc::InvalidArgument;
  };
  CHECK(code_of([&] { make(text("x"), 0); }) == Errc::ZeroTtl);
  CHECK(code_of([&] { make(text("x"), -5); }) == Errc::ZeroTtl);
  CHECK(code_of([&] { make(Bytes(11, 'x'), kHour, BundleKind::ContentUpdate, 10); }) == Errc::OversizePayload);
  CHECK(code_of([&] { make(Bytes{}, kHour); }) == Errc::EmptyPayload);
  CHECK_NOTHROW(make(Bytes{}, kHour, BundleKind::TopicRequest));
  CHECK_THROWS_AS(NodeId(std::string(65, 'n')), Error);
  CHECK_THROWS_AS(NodeId(""), Error);
}

TEST_CASE("bundle image round trip and tamper detection") {
  auto b = create_bundle(NodeId("urban-1"), NodeId("rural-2"), BundleKind::ContentUpdate, Priority::Content,
                         text("The derivative measures change."), kDay, kT);
  auto image = encode_image(b);
  CHECK(image.size() == image_length(b.header));
  auto back = decode_image(image);
  REQUIRE(back);
  CHECK(*back == b);

  auto bad = image;
  bad.back() ^= 1;
  CHECK_FALSE(decode_image(bad));
  CHECK_FALSE(decode_image(ByteView(image).first(image.size() - 1)));
  CHECK_FALSE(decode_header_block(ByteView(image).first(10)));
}

TEST_CASE("range set keeps ranges sorted, disjoint and coalesced") {
  RangeSet r;
  r.add({128, 192});
  r.add({0, 64});
  CHECK(r.prefix_end() == 64);
  r.add({64, 128});
  CHECK(r.ranges().size() == 1);
  CHECK(r.prefix_end() == 192);
  r.add({256, 320});
  r.add({300, 400});
  CHECK(r.ranges() == std::vector<ByteRange>{{0, 192}, {256, 400}});
  CHECK(r.total_bytes() == 336);
  CHECK(r.contains({260, 390}));
  CHECK_FALSE(r.contains({190, 260}));
  r.truncate(100);
  CHECK(r.ranges() == std::vector<ByteRange>{{0, 100}});
  RangeSet gap({{64, 128}});
  CHECK(gap.prefix_end() == 0);
}
