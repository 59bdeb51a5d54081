#include <doctest.h>

#include <map>
#include <tuple>

#include "dtnl/common/error.hpp"
#include "dtnl/routing/routing.hpp"

using namespace dtnl;
using namespace dtnl::routing;

namespace {

RoleGraph four_node_graph() {
  return RoleGraph::parse("rural-1:rural, rural-2:rural, mule-1:mule, urban-1:urban");
}

Peer peer(const RoleGraph& g, const std::string& id) { return {NodeId(id), *g.role_of(NodeId(id))}; }

BundleMeta to(const std::string& dest) { return {BundleId{}, NodeId("src"), NodeId(dest), 1000}; }

}  // namespace

TEST_CASE("line topology basics") {
  auto g = four_node_graph();
  CHECK(should_offer(to("urban-1"), peer(g, "rural-1"), peer(g, "mule-1"), g));
  CHECK_FALSE(should_offer(to("urban-1"), peer(g, "mule-1"), peer(g, "rural-2"), g));
  CHECK(should_offer(to("urban-1"), peer(g, "mule-1"), peer(g, "urban-1"), g));
  CHECK(should_offer(to("rural-2"), peer(g, "urban-1"), peer(g, "mule-1"), g));
}

TEST_CASE("exhaustive (self, destination, peer) enumeration matches the hand-written table") {
  auto g = four_node_graph();
  // Row: self, destination, then expected verdict for each peer in the order
  // listed. Written out by hand from the line topology, not from the code.
  struct Row {
    const char* self;
    const char* dest;
    std::array<std::pair<const char*, bool>, 3> peers;
  };
  const Row table[] = {
      {"rural-1", "rural-1", {{{"rural-2", false}, {"mule-1", false}, {"urban-1", false}}}},
      {"rural-1", "rural-2", {{{"rural-2", true}, {"mule-1", true}, {"urban-1", false}}}},
      {"rural-1", "mule-1", {{{"rural-2", false}, {"mule-1", true}, {"urban-1", false}}}},
      {"rural-1", "urban-1", {{{"rural-2", false}, {"mule-1", true}, {"urban-1", true}}}},
      {"rural-2", "rural-1", {{{"rural-1", true}, {"mule-1", true}, {"urban-1", false}}}},
      {"rural-2", "rural-2", {{{"rural-1", false}, {"mule-1", false}, {"urban-1", false}}}},
      {"rural-2", "mule-1", {{{"rural-1", false}, {"mule-1", true}, {"urban-1", false}}}},
      {"rural-2", "urban-1", {{{"rural-1", false}, {"mule-1", true}, {"urban-1", true}}}},
      {"mule-1", "rural-1", {{{"rural-1", true}, {"rural-2", false}, {"urban-1", false}}}},
      {"mule-1", "rural-2", {{{"rural-1", false}, {"rural-2", true}, {"urban-1", false}}}},
      {"mule-1", "mule-1", {{{"rural-1", false}, {"rural-2", false}, {"urban-1", false}}}},
      {"mule-1", "urban-1", {{{"rural-1", false}, {"rural-2", false}, {"urban-1", true}}}},
      {"urban-1", "rural-1", {{{"rural-1", true}, {"rural-2", false}, {"mule-1", true}}}},
      {"urban-1", "rural-2", {{{"rural-1", false}, {"rural-2", true}, {"mule-1", true}}}},
      {"urban-1", "mule-1", {{{"rural-1", false}, {"rural-2", false}, {"mule-1", true}}}},
      {"urban-1", "urban-1", {{{"rural-1", false}, {"rural-2", false}, {"mule-1", false}}}},
  };
  std::map<std::tuple<std::string, std::string, std::string>, bool> expected;
  for (const auto& row : table)
    for (const auto& [p, verdict] : row.peers) expected[{row.self, row.dest, p}] = verdict;
  REQUIRE(expected.size() == 48);

  int checked = 0;
  for (const auto& [self_id, self_role] : g.nodes())
    for (const auto& [dest_id, dest_role] : g.nodes())
      for (const auto& [peer_id, peer_role] : g.nodes()) {
        if (peer_id == self_id) continue;
        bool got = should_offer(to(dest_id.str()), {self_id, self_role}, {peer_id, peer_role}, g);
        INFO(self_id.str(), " -> ", dest_id.str(), " via ", peer_id.str());
        CHECK(got == expected.at({self_id.str(), dest_id.str(), peer_id.str()}));
        ++checked;
      }
  CHECK(checked == 48);
}

TEST_CASE("no ping-pong within a session and no mule-to-mule relaying") {
  auto g = RoleGraph::parse("rural-1:rural,mule-1:mule,mule-2:mule,urban-1:urban");
  CHECK_FALSE(should_offer(to("urban-1"), peer(g, "rural-1"), peer(g, "mule-1"), g, true));
  for (const char* dest : {"rural-1", "urban-1"}) {
    CHECK_FALSE(should_offer(to(dest), peer(g, "mule-1"), peer(g, "mule-2"), g));
    CHECK_FALSE(should_offer(to(dest), peer(g, "mule-2"), peer(g, "mule-1"), g));
  }
}

TEST_CASE("unknown destination is never offered") {
  auto g = four_node_graph();
  CHECK_FALSE(should_offer(to("atlantis"), peer(g, "rural-1"), peer(g, "mule-1"), g));
}

TEST_CASE("custodian role sequence is a subsequence of [source, mule, destination]") {
  // Walk each bundle greedily along should_offer over the contact sequence
  // rural/urban <-> mule and record custodian roles.
  auto g = four_node_graph();
  const std::vector<std::string> contacts = {"rural-1", "urban-1", "rural-2", "urban-1", "rural-1", "rural-2"};
  for (const auto& [src, src_role] : g.nodes()) {
    if (src_role == NodeRole::Mule) continue;
    for (const auto& [dst, dst_role] : g.nodes()) {
      if (dst == src || dst_role == NodeRole::Mule) continue;
      Peer holder{src, src_role};
      std::vector<NodeRole> roles = {src_role};
      for (int lap = 0; lap < 3 && holder.id != dst; ++lap) {
        for (const auto& stop : contacts) {
          Peer mule = peer(g, "mule-1");
          Peer stop_peer = peer(g, stop);
          if (holder.id == stop_peer.id && should_offer(to(dst.str()), holder, mule, g)) {
            holder = mule;
            roles.push_back(NodeRole::Mule);
          } else if (holder.id == mule.id && should_offer(to(dst.str()), mule, stop_peer, g)) {
            holder = stop_peer;
            roles.push_back(stop_peer.role);
          }
          if (holder.id == dst) break;
        }
      }
      CHECK(holder.id == dst);
      CHECK(roles == std::vector<NodeRole>{src_role, NodeRole::Mule, dst_role});
    }
  }
}

TEST_CASE("accept_offer") {
  const std::uint64_t MB = 1'000'000;
  BundleMeta b20{BundleId{}, NodeId("urban-1"), NodeId("rural-1"), 20 * MB};
  CHECK(accept_offer(b20, NodeRole::Mule, 100 * MB, false) == OfferDecision::Accept);
  CHECK(accept_offer(b20, NodeRole::Mule, 100 * MB, true) == OfferDecision::RejectDuplicate);
  BundleMeta b30{BundleId{}, NodeId("urban-1"), NodeId("rural-1"), 30 * MB};
  CHECK(accept_offer(b30, NodeRole::Rural, 10 * MB, false) == OfferDecision::RejectQuota);
  CHECK(accept_offer(b30, NodeRole::Rural, 30 * MB, false) == OfferDecision::Accept);
}

TEST_CASE("role graph parsing") {
  auto g = RoleGraph::parse("a:rural,b:mule");
  CHECK(g.to_spec() == "a:rural,b:mule");
  CHECK_THROWS_AS(RoleGraph::parse("a:pilot"), Error);
  CHECK_THROWS_AS(RoleGraph::parse("a"), Error);
  CHECK_THROWS_AS(RoleGraph::parse("a:rural,a:mule"), Error);
}
