#include <doctest.h>
#include <httplib.h>

#include <shared_mutex>

#include "dtnl/content/api.hpp"
#include "dtnl/content/http_server.hpp"
#include "support/temp_dir.hpp"

using namespace dtnl;
using namespace dtnl::content;
using nlohmann::json;
using dtnl::testing::TempDir;

namespace {

struct Fixture {
  TempDir dir;
  BundleStore store;
  ContentService svc;
  Millis now = 1'000'000;
  Api api;

  Fixture()
      : store(BundleStore::open([this] {
          StoreOptions o;
          o.root = dir / "store";
          o.sync = false;
          return o;
        }())),
        svc(
            [] {
              ServiceOptions o;
              o.self = NodeId("rural-1");
              o.gateway = NodeId("urban-1");
              return o;
            }(),
            store),
        api(&svc, Api::Hooks{[this] { return now; }, [] { return json{{"role", "rural"}}; }, nullptr}) {}

  std::pair<int, json> call(const std::string& method, const std::string& path, const std::string& body = {},
                            std::map<std::string, std::string> query = {}) {
    auto r = api.handle({method, path, std::move(query), body});
    return {r.status, json::parse(r.body)};
  }
};

}  // namespace

TEST_CASE("content endpoints") {
  Fixture f;
  auto [s0, empty] = f.call("GET", "/api/content");
  CHECK(s0 == 200);
  CHECK(empty == json::array());

  auto [s1, item] = f.call("POST", "/api/content", R"({"title":"Algebra","body":"one"})");
  CHECK(s1 == 201);
  CHECK(item["version"] == 1);
  CHECK(item["origin"] == "LocalAuthor");
  f.now += 5;
  f.call("POST", "/api/content", R"({"title":"Algebra","body":"two"})");
  f.call("POST", "/api/content", R"({"title":"Zebra Crossing","body":"z"})");

  auto [s2, list] = f.call("GET", "/api/content");
  REQUIRE(list.size() == 2);
  CHECK(list[0]["title"] == "Algebra");
  CHECK(list[0]["version"] == 2);
  CHECK(list[0].contains("body") == false);

  auto [s3, v1] = f.call("GET", "/api/content/Algebra", {}, {{"version", "1"}});
  CHECK(s3 == 200);
  CHECK(v1["body"] == "one");
  auto [s4, latest] = f.call("GET", "/api/content/Zebra Crossing");
  CHECK(latest["body"] == "z");

  auto [s5, missing] = f.call("GET", "/api/content/Nope");
  CHECK(s5 == 404);
  CHECK(missing["error"] == "NotFound");
  CHECK(missing.contains("message"));

  CHECK(f.call("POST", "/api/content", R"({"title":"  ","body":"x"})").first == 400);
  CHECK(f.call("POST", "/api/content", R"({"title":"  ","body":"x"})").second["error"] == "EmptyTitle");
  CHECK(f.call("POST", "/api/content", R"({"title":"x"})").first == 400);
  CHECK(f.call("POST", "/api/content", "{not json").first == 400);
  CHECK(f.call("GET", "/api/content/Algebra", {}, {{"version", "zero"}}).first == 400);
  CHECK(f.call("DELETE", "/api/content").first == 405);
  CHECK(f.call("GET", "/api/elsewhere").first == 404);
}

TEST_CASE("request endpoints") {
  Fixture f;
  auto [s1, r1] = f.call("POST", "/api/requests", R"({"topic":"Photosynthesis"})");
  CHECK(s1 == 201);
  CHECK(r1["status"] == "PendingPickup");
  CHECK(r1["resolved_at"].is_null());
  auto [s2, r2] = f.call("POST", "/api/requests", R"({"topic":"Photosynthesis"})");
  CHECK(s2 == 200);
  CHECK(r2["request_id"] == r1["request_id"]);
  auto [s3, list] = f.call("GET", "/api/requests");
  CHECK(list.size() == 1);
  auto [s4, one] = f.call("GET", "/api/requests/" + r1["request_id"].get<std::string>());
  CHECK(s4 == 200);
  CHECK(one["topic"] == "Photosynthesis");
  CHECK(f.call("POST", "/api/requests", R"({"topic":""})").second["error"] == "EmptyTopic");
  CHECK(f.call("GET", "/api/requests/unknown").first == 404);
}

TEST_CASE("status, gateway and role errors") {
  Fixture f;
  CHECK(f.call("GET", "/api/node/status").second["role"] == "rural");
  CHECK(f.call("GET", "/api/gateway/jobs").first == 409);

  Api mule(nullptr, {});
  auto r = mule.handle({"GET", "/api/content", {}, {}});
  CHECK(r.status == 409);
  CHECK(json::parse(r.body)["error"] == "UnsupportedRole");
}

TEST_CASE("served over HTTP") {
  Fixture f;
  std::shared_mutex mu;
  HttpServer server(f.api, mu);
  REQUIRE(server.start("127.0.0.1", 0));
  httplib::Client client("127.0.0.1", server.port());
  auto post = client.Post("/api/content", R"({"title":"Photo synthesis","body":"light"})", "application/json");
  REQUIRE(post);
  CHECK(post->status == 201);
  auto get = client.Get("/api/content/Photo%20synthesis");
  REQUIRE(get);
  CHECK(get->status == 200);
  CHECK(json::parse(get->body)["body"] == "light");
  auto q = client.Get("/api/content?q=photo");
  REQUIRE(q);
  CHECK(json::parse(q->body).size() == 1);
  auto bad = client.Post("/api/requests", "[]", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(bad->get_header_value("Content-Type") == "application/json");
  server.stop();
}
