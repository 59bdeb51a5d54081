#include <doctest.h>

#include "dtnl/node/contact.hpp"
#include "support/temp_dir.hpp"

using namespace dtnl;
using namespace dtnl::node;
using dtnl::testing::TempDir;

namespace {

const char* kGraph = "rural-1:rural,mule-1:mule,urban-1:urban";

NodeOptions options_for(const char* id, NodeRole role, const std::filesystem::path& dir) {
  NodeOptions o;
  o.self = {NodeId(id), role};
  o.graph = routing::RoleGraph::parse(kGraph);
  o.store.root = dir / id / "store";
  o.store.sync = false;
  o.app_root = dir / id / "app";
  o.sync = false;
  if (role == NodeRole::Rural) o.gateway = NodeId("urban-1");
  return o;
}

struct Recorder : NodeObserver {
  std::vector<std::string> events;
  void bundle_completed(const BundleId& id, Millis t) override {
    events.push_back("completed " + to_hex(id).substr(0, 8) + " @" + std::to_string(t));
  }
  void custody_released(const BundleId& id, Millis t) override {
    events.push_back("released " + to_hex(id).substr(0, 8) + " @" + std::to_string(t));
  }
  void request_resolved(const content::TopicRequest& r, Millis t) override {
    events.push_back(std::string("resolved ") + content::to_string(r.status) + " @" + std::to_string(t));
  }
};

}  // namespace

TEST_CASE("request round trip across three nodes") {
  TempDir dir;
  gateway::MemoryCorpus corpus;
  corpus.add("Photosynthesis", "<p>Plants turn light into sugar.</p>");
  Recorder rural_log;
  Node rural(options_for("rural-1", NodeRole::Rural, dir.path()), nullptr, &rural_log);
  Node mule(options_for("mule-1", NodeRole::Mule, dir.path()), nullptr);
  Node urban(options_for("urban-1", NodeRole::Urban, dir.path()), &corpus);

  const auto req = rural.request_topic("Photosynthesis", 1000);
  const auto rid = req.request_id;

  auto c1 = run_contact(mule, rural, proto::kUnlimitedBudget, 2000);
  CHECK(c1.initiator.phase == proto::Phase::Done);
  CHECK(rural.content()->requests().find(rid)->status == content::RequestStatus::InTransit);
  CHECK(rural.store().size() == 0);
  CHECK(mule.store().size() == 1);

  run_contact(mule, urban, proto::kUnlimitedBudget, 3000);
  CHECK(mule.store().size() == 0);
  REQUIRE(urban.fetch_gateway()->jobs().size() == 1);
  CHECK(urban.content()->requests().find(rid)->status == content::RequestStatus::AtGateway);
  CHECK(urban.poll_gateway(3000) == 1);

  run_contact(mule, urban, proto::kUnlimitedBudget, 4000);
  CHECK(mule.store().size() == 1);
  run_contact(mule, rural, proto::kUnlimitedBudget, 5000);
  const auto* r = rural.content()->requests().find(rid);
  CHECK(r->status == content::RequestStatus::Fulfilled);
  CHECK(r->resolved_at == 5000);
  CHECK(rural.content()->catalog().get("Photosynthesis").body == "Plants turn light into sugar.");
  CHECK(rural.peer_last_seen().at(NodeId("mule-1")) == 5000);
  CHECK(mule.store().size() == 0);
  CHECK(rural_log.events.back() == "resolved Fulfilled @5000");

  auto status = rural.status_json();
  CHECK(status["role"] == "rural");
  CHECK(status["requests_open"] == 0);
}

TEST_CASE("interrupted contact resumes from stored ranges") {
  TempDir dir;
  gateway::SyntheticCorpus corpus(1, 200'000, 200'000);
  auto ro = options_for("rural-1", NodeRole::Rural, dir.path());
  auto mo = options_for("mule-1", NodeRole::Mule, dir.path());
  auto uo = options_for("urban-1", NodeRole::Urban, dir.path());
  for (auto* o : {&ro, &mo, &uo}) o->store.chunk_size = 16 * 1024;
  Node rural(ro, nullptr);
  Node mule(mo, nullptr);
  Node urban(uo, &corpus);
  rural.request_topic("Volcanoes", 0);
  run_contact(mule, rural, proto::kUnlimitedBudget, 10);
  run_contact(mule, urban, proto::kUnlimitedBudget, 20);
  urban.poll_gateway(20);

  auto cut = run_contact(mule, urban, 90'000, 30);
  CHECK(cut.pipe.budget_exhausted);
  CHECK(cut.initiator.phase == proto::Phase::Aborted);
  REQUIRE(mule.store().size() == 1);
  const auto& partial = mule.store().entries().begin()->second;
  CHECK_FALSE(partial.complete());
  const auto have = partial.received.prefix_end();
  CHECK(have > 0);

  auto rest = run_contact(mule, urban, proto::kUnlimitedBudget, 40);
  CHECK(rest.responder.outgoing.at(0).start_offset == have);
  CHECK(rest.responder.resumed_outgoing == 1);
  run_contact(mule, rural, proto::kUnlimitedBudget, 50);
  CHECK(rural.content()->catalog().find("Volcanoes") != nullptr);
}

TEST_CASE("complete self-addressed bundles are delivered on recovery") {
  TempDir dir;
  auto ro = options_for("rural-1", NodeRole::Rural, dir.path());
  content::ContentUpdateMsg m{"Algebra", 1, "x", content::Origin::LocalAuthor, 5};
  auto b = create_bundle(NodeId("urban-1"), NodeId("rural-1"), BundleKind::ContentUpdate, Priority::Content,
                         content::serialize(m), kDefaultBundleTtl, 5);
  {
    auto store = BundleStore::open(ro.store);
    store.put(b, 10);
  }
  Node rural(ro, nullptr);
  CHECK(rural.content()->catalog().find("Algebra") == nullptr);
  rural.recover(20);
  CHECK(rural.content()->catalog().get("Algebra").body == "x");
  CHECK(rural.store().was_released(b.header.id));
  Node again(ro, nullptr);
  again.recover(30);
  CHECK(again.content()->catalog().get("Algebra").version == 1);
}
