// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/sim/kernels.hpp"

#include <algorithm>
#include <exception>

#include "dtnl/common/error.hpp"

namespace dtnl::sim {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Wait for sample i, or -1 when no window follows.
Millis sample_wait(const std::vector<Millis>& starts, Millis from, std::uint64_t span, std::uint64_t seed,
                   std::uint64_t i) {
  const auto r = splitmix64(seed + i);
  const Millis t = from + static_cast<Millis>((static_cast<u128>(r) * span) >> 64);
  auto it = std::lower_bound(starts.begin(), starts.end(), t);
  return it == starts.end() ? -1 : *it - t;
}

void check_range(Millis from, Millis to) {
  if (from >= to) throw Error(Errc::InvalidArgument, "pickup wait needs from < to");
}

}  // namespace

std::vector<Millis> window_starts(const std::vector<ContactWindow>& plan, const NodeId& stop) {
  std::vector<Millis> out;
  for (const auto& w : plan)
    if (w.stop == stop) out.push_back(w.start);
  std::sort(out.begin(), out.end());
  return out;
}

PickupWait pickup_wait_serial(const std::vector<Millis>& starts, Millis from, Millis to, std::uint64_t samples,
                              std::uint64_t seed) {
  check_range(from, to);
  const auto span = static_cast<std::uint64_t>(to - from);
  PickupWait out;
  out.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Millis w = sample_wait(starts, from, span, seed, i);
    if (w < 0)
      ++out.unserved;
    else
      out.total_wait_ms += static_cast<std::uint64_t>(w);
  }
  return out;
}

PickupWait pickup_wait_parallel(const std::vector<Millis>& starts, Millis from, Millis to, std::uint64_t samples,
                                std::uint64_t seed) {
  check_range(from, to);
  const auto span = static_cast<std::uint64_t>(to - from);
  std::uint64_t total = 0, unserved = 0;
  const auto n = static_cast<std::int64_t>(samples);
#pragma omp parallel for reduction(+ : total, unserved) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Millis w = sample_wait(starts, from, span, seed, static_cast<std::uint64_t>(i));
    if (w < 0)
      ++unserved;
    else
      total += static_cast<std::uint64_t>(w);
  }
  PickupWait out;
  out.samples = samples;
  out.total_wait_ms = total;
  out.unserved = unserved;
  return out;
}

std::vector<SimResult> run_sweep_serial(const std::vector<SimConfig>& configs) {
  std::vector<SimResult> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(run_sim(c));
  return out;
}

std::vector<SimResult> run_sweep_parallel(const std::vector<SimConfig>& configs) {
  std::vector<SimResult> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_sim(configs[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<SimConfig> sweep_configs(const SimConfig& base, const std::string& key, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error(Errc::ScenarioInvalid, "sweep range must satisfy a <= b");
  std::vector<SimConfig> out;
  for (std::int64_t v = lo; v <= hi; ++v) {
    auto c = base;
    set_param(c, key, std::to_string(v));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace dtnl::sim
