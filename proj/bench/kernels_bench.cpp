// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

// Serial versus OpenMP: Monte Carlo pickup wait and scenario sweeps.

#include <benchmark/benchmark.h>

#include "dtnl/sim/kernels.hpp"
#include "dtnl/sim/sim.hpp"

namespace {

using namespace dtnl;
using namespace dtnl::sim;

std::vector<Millis> campus_starts(std::uint32_t mules) {
  auto c = campus_default();
  c.mule_count = mules;
  c.duration = 500 * c.cycle_period;
  return window_starts(build_contact_plan(c), NodeId("rural-1"));
}

void BM_PickupWaitSerial(benchmark::State& state) {
  const auto starts = campus_starts(2);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pickup_wait_serial(starts, 0, starts.back(), n, 1).total_wait_ms);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PickupWaitParallel(benchmark::State& state) {
  const auto starts = campus_starts(2);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pickup_wait_parallel(starts, 0, starts.back(), n, 1).total_wait_ms);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<SimConfig> small_sweep() {
  auto c = campus_default();
  c.duration = 12 * kHour;
  c.random_requests.reset();
  c.workload.clear();
  for (int i = 0; i < 4; ++i) {
    WorkloadEvent e;
    e.kind = WorkloadEvent::Kind::Request;
    e.at = i * kHour;
    e.node = NodeId("rural-1");
    e.topic = "Topic " + std::to_string(i);
    e.size = 200'000;
    c.workload.push_back(e);
  }
  return sweep_configs(c, "mule_count", 1, 4);
}

void BM_SweepSerial(benchmark::State& state) {
  const auto configs = small_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(configs).size());
}

void BM_SweepParallel(benchmark::State& state) {
  const auto configs = small_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_parallel(configs).size());
}

}  // namespace

BENCHMARK(BM_PickupWaitSerial)->Arg(10'000)->Arg(1'000'000);
BENCHMARK(BM_PickupWaitParallel)->Arg(10'000)->Arg(1'000'000);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
