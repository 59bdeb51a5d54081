#include <doctest.h>

#include <map>
#include <random>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/sim/kernels.hpp"
#include "dtnl/sim/sim.hpp"
#include "support/sim_gen.hpp"
#include "support/temp_dir.hpp"

using namespace dtnl;
using namespace dtnl::sim;

namespace {

SimConfig two_stop(Millis fixed, Millis duration) {
  SimConfig c;
  c.name = "two-stop";
  c.stops = {{NodeId("rural-1"), NodeRole::Rural, 0}, {NodeId("urban-1"), NodeRole::Urban, 1200 * kSecond}};
  c.contact_duration = DurationDist::fixed(fixed);
  c.duration = duration;
  c.seed = 3;
  return c;
}

WorkloadEvent request(Millis at, std::string topic, std::uint64_t size, const char* node = "rural-1") {
  WorkloadEvent e;
  e.kind = WorkloadEvent::Kind::Request;
  e.at = at;
  e.node = NodeId(node);
  e.topic = std::move(topic);
  e.size = size;
  return e;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;  // sentinel: nothing thrown
}

}  // namespace

TEST_CASE("byte budget arithmetic") {
  // duration × 20 Mbit/s / 8 × 0.95
  CHECK(byte_budget(10 * kSecond, 20'000'000, 50'000) == 23'750'000);
  CHECK(byte_budget(30 * kSecond, 20'000'000, 50'000) == 71'250'000);
  CHECK(byte_budget(5 * kSecond, 20'000'000, 50'000) == 11'875'000);
  CHECK(byte_budget(1, 8'000, 0) == 1);
  CHECK(byte_budget(1, 7'999, 0) == 0);
  CHECK(byte_budget(0, 20'000'000, 0) == 0);
}

TEST_CASE("contact plan geometry") {
  auto c = two_stop(10 * kSecond, 4800 * kSecond);
  auto plan = build_contact_plan(c);
  REQUIRE(plan.size() == 4);
  const Millis starts[] = {0, 1200, 2400, 3600};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(plan[i].start == starts[i] * kSecond);
    CHECK(plan[i].duration == 10 * kSecond);
    CHECK(plan[i].mule == 0);
    CHECK(plan[i].byte_budget == 23'750'000);
  }
  CHECK(plan[0].stop == NodeId("rural-1"));
  CHECK(plan[1].stop == NodeId("urban-1"));

  c.mule_count = 2;
  c.duration = 10'000 * kSecond;
  plan = build_contact_plan(c);
  std::vector<Millis> m0, m1;
  for (const auto& w : plan) (w.mule == 0 ? m0 : m1).push_back(w.start);
  REQUIRE(m1.size() + 1 == m0.size());  // the shifted last window falls past the horizon
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m1[i] == m0[i] + 1200 * kSecond);
  for (std::size_t i = 1; i < plan.size(); ++i) CHECK(plan[i - 1].start <= plan[i].start);

  SUBCASE("a window starting at the horizon is dropped") {
    auto d = two_stop(10 * kSecond, 3600 * kSecond);
    CHECK(build_contact_plan(d).size() == 3);
  }
}

TEST_CASE("contact plan is deterministic per seed and differs only in durations") {
  auto c = campus_default();
  c.duration = 24 * kHour;
  const auto a = build_contact_plan(c);
  CHECK(a == build_contact_plan(c));
  for (const auto& w : a) {
    CHECK(w.duration >= 5 * kSecond);
    CHECK(w.duration <= 30 * kSecond);
    CHECK(w.byte_budget == byte_budget(w.duration, c.link_rate_bps, c.overhead_ppm));
  }
  c.seed = 8;
  const auto b = build_contact_plan(c);
  REQUIRE(a.size() == b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].start == b[i].start);
    CHECK(a[i].stop == b[i].stop);
    CHECK(a[i].mule == b[i].mule);
    differs = differs || a[i].duration != b[i].duration;
  }
  CHECK(differs);

  // Mule-major draw order: adding a mule leaves the first mule's draws alone.
  c.seed = 7;
  auto one = build_contact_plan(c);
  c.mule_count = 2;
  auto two = build_contact_plan(c);
  std::vector<Millis> d1, d2;
  for (const auto& w : one) d1.push_back(w.duration);
  for (const auto& w : two)
    if (w.mule == 0) d2.push_back(w.duration);
  CHECK(d1 == d2);
}

TEST_CASE("durations are spread over the whole range") {
  auto c = campus_default();
  c.duration = 2000 * c.cycle_period;
  std::map<Millis, int> buckets;  // 5 s wide
  for (const auto& w : build_contact_plan(c)) ++buckets[(w.duration - 5 * kSecond) / (5 * kSecond)];
  // 4000 draws over [5 s, 30 s]; the five full buckets hold ~800 each.
  for (int b = 0; b < 5; ++b) {
    CHECK(buckets[b] > 650);
    CHECK(buckets[b] < 950);
  }
}

TEST_CASE("invalid configurations") {
  auto c = two_stop(10 * kSecond, kHour);
  c.stops[1].phase = c.cycle_period;
  CHECK(code_of([&] { validate(c); }) == Errc::InvalidConfig);
  c = two_stop(10 * kSecond, kHour);
  c.contact_duration = DurationDist::uniform(30 * kSecond, 5 * kSecond);
  CHECK(code_of([&] { build_contact_plan(c); }) == Errc::InvalidConfig);
  c = two_stop(10 * kSecond, kHour);
  c.stops[1].phase = 5 * kSecond;  // closer than a contact
  CHECK(code_of([&] { validate(c); }) == Errc::InvalidConfig);
  c = two_stop(10 * kSecond, kHour);
  c.link_rate_bps = 0;
  CHECK(code_of([&] { validate(c); }) == Errc::InvalidConfig);
  c = two_stop(10 * kSecond, kHour);
  c.stops.pop_back();
  CHECK(code_of([&] { validate(c); }) == Errc::InvalidConfig);
  c = two_stop(10 * kSecond, kHour);
  c.workload.push_back(request(0, "x", 10, "rural-9"));
  CHECK(code_of([&] { run_sim(c); }) == Errc::WorkloadError);
  c.workload = {request(0, "x", 10, "urban-1")};
  CHECK(code_of([&] { run_sim(c); }) == Errc::WorkloadError);
}

TEST_CASE("analytic round trip examples") {
  auto c = two_stop(10 * kSecond, 48 * kHour);
  auto b = analytic_bounds(c, 1 * kSecond);
  CHECK(b.pickup == 2400 * kSecond);
  CHECK(b.at_urban == 3600 * kSecond);
  CHECK(b.response_pickup == 6000 * kSecond);
  CHECK(b.fulfilled == 7200 * kSecond);
  CHECK(b.min_rtt == 7199 * kSecond);
  CHECK(b.max_rtt == b.min_rtt);

  // Created exactly at a rural window start: picked up in that window.
  auto on_edge = analytic_bounds(c, 2400 * kSecond);
  auto just_after = analytic_bounds(c, 2400 * kSecond + 1);
  CHECK(on_edge.min_rtt == 4800 * kSecond);
  CHECK(just_after.fulfilled - on_edge.fulfilled == c.cycle_period);

  c.mule_count = 2;
  CHECK(analytic_bounds(c, 1 * kSecond).min_rtt < b.min_rtt);

  auto stochastic = campus_default();
  CHECK(code_of([&] { analytic_bounds(stochastic, 0); }) == Errc::AssumptionViolated);
  auto tight = two_stop(10 * kSecond, 48 * kHour);
  tight.workload = {request(0, "Big", 30'000'000)};
  CHECK(code_of([&] { analytic_bounds(tight, 0); }) == Errc::AssumptionViolated);
  auto short_run = two_stop(10 * kSecond, 7000 * kSecond);
  CHECK(code_of([&] { analytic_bounds(short_run, 1); }) == Errc::AssumptionViolated);
}

TEST_CASE("one 1 MB round trip matches the analytic oracle") {
  auto c = two_stop(60 * kSecond, 6 * kHour);
  c.workload = {request(1 * kSecond, "Photosynthesis", 1'000'000)};
  auto r = run_sim(c);
  REQUIRE(r.metrics.requests.size() == 1);
  const auto& q = r.metrics.requests[0];
  CHECK(q.status == "Fulfilled");
  CHECK(q.rtt() == analytic_bounds(c, 1 * kSecond).min_rtt);
  CHECK(q.rtt() == 7199 * kSecond);
  CHECK(r.metrics.aborted_sessions == 0);
  CHECK(r.metrics.conservation_violations == 0);
  REQUIRE(r.metrics.bundles.size() == 2);
  CHECK(r.metrics.bundles[0].kind == BundleKind::TopicRequest);
  CHECK(r.metrics.bundles[0].delivered_at == 3600 * kSecond);
  CHECK(r.metrics.bundles[1].kind == BundleKind::ContentResponse);
  CHECK(r.metrics.bundles[1].created_at == 3600 * kSecond);
  CHECK(r.metrics.bundles[1].delivered_at == 7200 * kSecond);
  CHECK(r.metrics.bundles[1].image_len > 1'000'000);
  for (const auto& n : r.nodes)
    if (n.id == NodeId("rural-1")) CHECK(n.catalog_titles == std::vector<std::string>{"Photosynthesis"});
}

TEST_CASE("a 30 MB response across 10 s contacts is resumed, not restarted") {
  auto c = two_stop(10 * kSecond, 12 * kHour);
  c.workload = {request(0, "Volcanoes", 30'000'000)};
  auto r = run_sim(c);
  REQUIRE(r.metrics.requests.size() == 1);
  CHECK(r.metrics.requests[0].status == "Fulfilled");
  const auto& resp = r.metrics.bundles.at(1);
  REQUIRE(resp.kind == BundleKind::ContentResponse);
  const std::uint64_t budget = 23'750'000;

  // Urban leg: first contact aborts with a partial, the next finishes it.
  std::vector<const ContactRecord*> urban;
  for (const auto& k : r.metrics.contacts)
    if (k.window.stop == NodeId("urban-1") && k.payload_bytes > 100'000) urban.push_back(&k);
  REQUIRE(urban.size() == 2);
  CHECK(urban[0]->aborted);
  CHECK(urban[0]->bundles_completed == 0);
  CHECK(urban[1]->resumed == 1);
  CHECK(urban[1]->bundles_completed == 1);
  CHECK(urban[1]->payload_bytes >= 30'000'000 - budget);
  CHECK(urban[0]->payload_bytes + urban[1]->payload_bytes == resp.image_len);

  CHECK(r.metrics.aborted_sessions == 2);  // once per leg
  CHECK(r.metrics.resumed_transfers == 2);
  CHECK(resp.hops == 2);
  CHECK(resp.receivers == 2);
  CHECK(resp.interrupted == 2);
  CHECK(resp.chunk_bytes <= resp.hops * resp.image_len + 64 * 1024 * resp.interrupted);
  CHECK(r.metrics.conservation_violations == 0);
}

TEST_CASE("zero workload is a vacuous run") {
  auto r = run_sim(two_stop(10 * kSecond, 12 * kHour));
  CHECK(r.metrics.bundles.empty());
  CHECK(r.metrics.requests.empty());
  CHECK(r.metrics.freshness.empty());
  CHECK(r.metrics.aborted_sessions == 0);
  CHECK(r.metrics.contacts.size() == 36);
  CHECK_FALSE(summarize(r).mean_freshness_s);
  CHECK(summary_json(r)["mean_rtt_s"].is_null());
}

TEST_CASE("property: simulated round trips equal the analytic oracle") {
  std::mt19937_64 rng(0xAB);
  for (int trial = 0; trial < 12; ++trial) {
    const auto c = testing::random_fixed_config(rng);
    CAPTURE(to_json(c).dump());
    auto r = run_sim(c);
    REQUIRE(r.metrics.requests.size() == c.workload.size());
    for (const auto& q : r.metrics.requests) {
      CHECK(q.status == "Fulfilled");
      CHECK(q.rtt() == analytic_bounds(c, q.created_at, q.node).min_rtt);
    }
    CHECK(r.metrics.conservation_violations == 0);
  }
}

TEST_CASE("property: capacity law, conservation and determinism under stochastic contacts") {
  std::mt19937_64 rng(0xCD);
  for (int trial = 0; trial < 6; ++trial) {
    auto c = testing::random_fixed_config(rng);
    // Short uniform contacts and bigger payloads force aborts.
    c.contact_duration = DurationDist::uniform(1 * kSecond, 4 * kSecond);
    c.link_rate_bps = 2'000'000;
    for (auto& e : c.workload) e.size = uniform_u64(rng, 100'000, 3'000'000);
    WorkloadEvent pub;
    pub.kind = WorkloadEvent::Kind::Publish;
    pub.at = c.cycle_period / 3;
    pub.node = NodeId("rural-1");
    pub.topic = "Local notes";
    pub.size = 50'000;
    c.workload.push_back(pub);
    // Early bundles may expire before the end.
    c.bundle_ttl = 3 * c.cycle_period;
    CAPTURE(to_json(c).dump());

    auto r = run_sim(c);
    for (const auto& k : r.metrics.contacts) {
      CHECK(k.payload_bytes <= k.window.byte_budget);
      CHECK(k.frame_bytes <= k.window.byte_budget);
      CHECK(k.goodput_Bps() <= static_cast<double>(c.link_rate_bps) / 8.0);
    }
    std::map<Fate, int> fates;
    for (const auto& b : r.metrics.bundles) {
      ++fates[b.fate];
      CHECK(b.fate != Fate::Violation);
      CHECK(b.deliveries <= 1);
      // Resumes never resend more than one chunk per interruption.
      CHECK(b.chunk_bytes <= b.receivers * b.image_len + c.chunk_size * b.interrupted);
      CHECK(b.hops <= b.receivers);
      CHECK(b.created_at >= 0);
      CHECK(b.created_at <= c.duration);
      if (b.delivered_at) CHECK(*b.delivered_at <= c.duration);
    }
    CHECK(r.metrics.conservation_violations == 0);
    CHECK(r.metrics.duplicate_deliveries == 0);
    for (const auto& f : r.metrics.freshness) {
      CHECK(f.at <= c.duration);
      CHECK(f.age >= 0);
    }

    auto again = run_sim(c);
    CHECK(bundles_csv(r.metrics) == bundles_csv(again.metrics));
    CHECK(requests_csv(r.metrics) == requests_csv(again.metrics));
    CHECK(contacts_csv(r.metrics) == contacts_csv(again.metrics));
    CHECK(freshness_csv(r.metrics) == freshness_csv(again.metrics));
  }
}

TEST_CASE("property: a second evenly phased mule never delays a request") {
  std::mt19937_64 rng(0xEF);
  for (int trial = 0; trial < 8; ++trial) {
    auto c = testing::random_fixed_config(rng, 1);
    CAPTURE(to_json(c).dump());
    auto one = run_sim(c);
    c.mule_count = 2;
    auto two = run_sim(c);
    REQUIRE(one.metrics.requests.size() == two.metrics.requests.size());
    for (std::size_t i = 0; i < one.metrics.requests.size(); ++i) {
      REQUIRE(one.metrics.requests[i].rtt());
      REQUIRE(two.metrics.requests[i].rtt());
      CHECK(*two.metrics.requests[i].rtt() <= *one.metrics.requests[i].rtt());
    }
  }
}

TEST_CASE("pickup wait: Monte Carlo against period / (2 × mules), serial equals parallel") {
  auto c = two_stop(10 * kSecond, 0);
  c.duration = 500 * c.cycle_period;
  for (std::uint32_t mules : {1u, 2u, 4u}) {
    c.mule_count = mules;
    const auto starts = window_starts(build_contact_plan(c), NodeId("rural-1"));
    const Millis to = 499 * c.cycle_period;
    const auto serial = pickup_wait_serial(starts, 0, to, 20'000, 42);
    const auto parallel = pickup_wait_parallel(starts, 0, to, 20'000, 42);
    CHECK(serial.total_wait_ms == parallel.total_wait_ms);
    CHECK(serial.unserved == 0);
    const double expect = static_cast<double>(c.cycle_period) / (2.0 * mules);
    CHECK(serial.mean_ms() == doctest::Approx(expect).epsilon(0.02));
  }
  CHECK(pickup_wait_serial({}, 0, 10, 5, 1).unserved == 5);
  CHECK(code_of([] { pickup_wait_serial({0}, 5, 5, 1, 1); }) == Errc::InvalidArgument);
}

TEST_CASE("sweep: parallel runs equal serial runs") {
  auto base = two_stop(30 * kSecond, 20 * kHour);
  base.workload = {request(100 * kSecond, "A", 50'000), request(5000 * kSecond, "B", 80'000)};
  auto configs = sweep_configs(base, "mule_count", 1, 3);
  REQUIRE(configs.size() == 3);
  CHECK(configs[2].mule_count == 3);
  auto s = run_sweep_serial(configs);
  auto p = run_sweep_parallel(configs);
  REQUIRE(s.size() == p.size());
  std::optional<double> prev;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(requests_csv(s[i].metrics) == requests_csv(p[i].metrics));
    CHECK(contacts_csv(s[i].metrics) == contacts_csv(p[i].metrics));
    auto mean = summarize(s[i]).mean_rtt_s;
    REQUIRE(mean);
    if (prev) CHECK(*mean <= *prev);
    prev = mean;
  }
  CHECK(code_of([&] { sweep_configs(base, "bogus", 1, 2); }) == Errc::ScenarioInvalid);
}

TEST_CASE("scenario files") {
  const auto c = campus_default();
  CHECK(parse_scenario(to_json(c)) == c);
  const auto file = load_scenario(DTNL_SCENARIO_DIR "/campus-default.json");
  CHECK(file == c);
  CHECK(builtin_scenario("campus-default") == c);
  CHECK_FALSE(builtin_scenario("nope"));

  auto w = two_stop(10 * kSecond, kDay);
  w.workload = {request(1500, "A", 10)};
  WorkloadEvent p;
  p.kind = WorkloadEvent::Kind::Publish;
  p.at = 2 * kSecond;
  p.node = NodeId("urban-1");
  p.topic = "News";
  p.size = 99;
  w.workload.push_back(p);
  CHECK(parse_scenario(to_json(w)) == w);

  auto bad = to_json(c);
  bad["stops"][0]["role"] = "mule";
  CHECK(code_of([&] { parse_scenario(bad); }) == Errc::ScenarioInvalid);
  bad = to_json(c);
  bad["colour"] = 1;
  CHECK(code_of([&] { parse_scenario(bad); }) == Errc::ScenarioInvalid);
  bad = to_json(c);
  bad["contact_duration"] = {{"poisson", 3}};
  CHECK(code_of([&] { parse_scenario(bad); }) == Errc::ScenarioInvalid);
  bad = to_json(c);
  bad["random_requests"]["node"] = "nowhere";
  CHECK(code_of([&] { parse_scenario(bad); }) == Errc::ScenarioInvalid);
  CHECK(code_of([] { load_scenario("/nonexistent/x.json"); }) == Errc::ScenarioInvalid);

  auto wl = expand_workload(c);
  REQUIRE(wl.size() == 10);
  for (std::size_t i = 0; i < wl.size(); ++i) {
    CHECK(wl[i].at >= 0);
    CHECK(wl[i].at < 12 * kHour);
    if (i) CHECK(wl[i - 1].at <= wl[i].at);
  }
  CHECK(expand_workload(c) == wl);
}

TEST_CASE("outputs on disk") {
  auto c = two_stop(60 * kSecond, 6 * kHour);
  c.workload = {request(1 * kSecond, "Photosynthesis", 10'000)};
  auto r = run_sim(c);
  dtnl::testing::TempDir dir;
  write_outputs(r, dir.path() / "out");
  CHECK(read_text(dir.path() / "out" / "requests.csv") == requests_csv(r.metrics));
  auto lines = read_lines(dir.path() / "out" / "requests.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "request_id,node,topic,created_s,status,resolved_s,rtt_s,fail_reason");
  CHECK(lines[1].find(",rural-1,Photosynthesis,1.000,Fulfilled,7200.000,7199.000,") != std::string::npos);
  auto summary = nlohmann::json::parse(read_text(dir.path() / "out" / "summary.json"));
  CHECK(summary["fulfilled"] == 1);
  CHECK(summary["mean_rtt_s"] == 7199.0);
  CHECK(format_summary(r).find("mean RTT            7199.0 s") != std::string::npos);
}
