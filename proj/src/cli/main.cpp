// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/daemon/config.hpp"
#include "dtnl/daemon/daemon.hpp"
#include "dtnl/gateway/source.hpp"
#include "dtnl/sim/config.hpp"
#include "dtnl/sim/kernels.hpp"
#include "dtnl/sim/sim.hpp"

namespace {

using namespace dtnl;
namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kRuntime = 1, kInvalid = 2, kBind = 3 };

int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::InvalidConfig:
    case Errc::ScenarioInvalid:
    case Errc::WorkloadError:
    case Errc::InvalidArgument: return kInvalid;
    case Errc::BindFailure: return kBind;
    default: return kRuntime;
  }
}

void on_stop(int) { daemon::signal_stop(); }
void on_toggle(int) { daemon::signal_toggle_range(); }

void install_signals() {
  struct sigaction sa {};
  sigemptyset(&sa.sa_mask);
  sa.sa_handler = on_stop;
  sigaction(SIGTERM, &sa, nullptr);
  sigaction(SIGINT, &sa, nullptr);
  sa.sa_handler = on_toggle;
  sigaction(SIGUSR1, &sa, nullptr);
  sa.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &sa, nullptr);
}

int cmd_run(const std::string& config_path) {
  auto config = daemon::load_config(config_path, daemon::process_env());
  install_signals();
  daemon::Daemon d(std::move(config));
  d.start();
  std::fprintf(stderr, "listening on port %d%s\n", d.listen_port(),
               d.api_port() > 0 ? fmt::format(", api port {}", d.api_port()).c_str() : "");
  d.run();
  return kOk;
}

sim::SimConfig scenario_from(const std::string& name_or_path) {
  if (fs::exists(name_or_path)) return sim::load_scenario(name_or_path);
  if (auto s = sim::builtin_scenario(name_or_path)) return *s;
  throw Error(Errc::ScenarioInvalid, "no scenario file or built-in scenario named '" + name_or_path + "'");
}

std::pair<std::string, std::string> split_kv(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(Errc::InvalidArgument, std::string(what) + ": expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::string opt_num(const nlohmann::json& v) { return v.is_null() ? "" : fmt::format("{:.3f}", v.get<double>()); }

int cmd_sim(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out,
            const std::vector<std::string>& sets, const std::string& sweep, bool serial) {
  auto config = scenario_from(scenario);
  if (seed) config.seed = *seed;
  for (const auto& s : sets) {
    auto [k, v] = split_kv(s, "--set");
    sim::set_param(config, k, v);
  }
  sim::validate(config);

  if (sweep.empty()) {
    const auto result = sim::run_sim(config);
    if (!out.empty()) sim::write_outputs(result, out);
    std::cout << sim::format_summary(result);
    return kOk;
  }

  auto [key, range] = split_kv(sweep, "--sweep");
  const auto dots = range.find("..");
  if (dots == std::string::npos) throw Error(Errc::InvalidArgument, "--sweep: expected key=lo..hi");
  std::int64_t lo = 0, hi = 0;
  try {
    lo = std::stoll(range.substr(0, dots));
    hi = std::stoll(range.substr(dots + 2));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "--sweep: bounds must be integers");
  }
  if (hi < lo) throw Error(Errc::InvalidArgument, "--sweep: empty range");
  const auto configs = sim::sweep_configs(config, key, lo, hi);
  const auto results = serial ? sim::run_sweep_serial(configs) : sim::run_sweep_parallel(configs);

  std::string csv = key + ",requests,fulfilled,mean_rtt_s,median_rtt_s,aborted_sessions,resumed_transfers,"
                          "mean_freshness_s,conservation_violations\n";
  std::cout << fmt::format("{:>14} {:>9} {:>12} {:>14} {:>8} {:>8} {:>14}\n", key, "fulfilled", "mean RTT s",
                           "median RTT s", "aborts", "resumes", "freshness s");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto v = lo + static_cast<std::int64_t>(i);
    const auto j = sim::summary_json(results[i]);
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", v, j["requests"].get<std::size_t>(),
                       j["fulfilled"].get<std::size_t>(), opt_num(j["mean_rtt_s"]), opt_num(j["median_rtt_s"]),
                       j["aborted_sessions"].get<std::uint64_t>(), j["resumed_transfers"].get<std::uint64_t>(),
                       opt_num(j["mean_freshness_s"]), j["conservation_violations"].get<std::uint64_t>());
    std::cout << fmt::format("{:>14} {:>9} {:>12} {:>14} {:>8} {:>8} {:>14}\n", v,
                             fmt::format("{}/{}", j["fulfilled"].get<std::size_t>(), j["requests"].get<std::size_t>()),
                             opt_num(j["mean_rtt_s"]), opt_num(j["median_rtt_s"]),
                             j["aborted_sessions"].get<std::uint64_t>(), j["resumed_transfers"].get<std::uint64_t>(),
                             opt_num(j["mean_freshness_s"]));
    if (!out.empty()) sim::write_outputs(results[i], fs::path(out) / fmt::format("{}={}", key, v));
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_file_atomic(fs::path(out) / "sweep.csv", csv, false);
  }
  return kOk;
}

int cmd_gen_corpus(std::uint64_t count, const std::string& size_range, std::uint64_t seed, const std::string& out) {
  const auto dash = size_range.find('-');
  if (dash == std::string::npos) throw Error(Errc::InvalidArgument, "--size-range: expected min-max in bytes");
  std::uint64_t lo = 0, hi = 0;
  try {
    lo = std::stoull(size_range.substr(0, dash));
    hi = std::stoull(size_range.substr(dash + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "--size-range: bounds must be byte counts");
  }
  if (lo == 0 || hi < lo) throw Error(Errc::InvalidArgument, "--size-range: need 0 < min <= max");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + out + ": " + ec.message());
  gateway::SyntheticCorpus corpus(seed, lo, hi);
  for (std::uint64_t i = 1; i <= count; ++i) {
    const auto topic = fmt::format("Topic {:03}", i);
    auto r = corpus.lookup(topic);
    write_file_atomic(fs::path(out) / (gateway::slugify(topic) + ".txt"), r.body, false);
  }
  std::cout << fmt::format("wrote {} article(s) to {}\n", count, out);
  return kOk;
}

int cmd_report(const std::string& dir) {
  const auto path = fs::path(dir) / "summary.json";
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    std::cout << sim::format_summary(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, path.string() + ": " + e.what());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-tolerant learning content node, simulator and tools"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a node daemon");
  run->add_option("config", config_path, "Node config file")->required();

  std::string scenario, out, sweep;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool serial = false;
  auto* sim_cmd = app.add_subcommand("sim", "Run a simulator scenario");
  sim_cmd->add_option("scenario", scenario, "Scenario file or built-in name (campus-default)")->required();
  sim_cmd->add_option("--seed", seed, "Override the scenario seed");
  sim_cmd->add_option("--out", out, "Directory for CSV and JSON outputs");
  sim_cmd->add_option("--set", sets, "Override a parameter, key=value (repeatable)");
  sim_cmd->add_option("--sweep", sweep, "Sweep an integer parameter, key=lo..hi");
  sim_cmd->add_flag("--serial", serial, "Run sweep points one after another");

  std::uint64_t count = 0, corpus_seed = 1;
  std::string size_range = "10000000-30000000", corpus_out;
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic article corpus");
  gen->add_option("--count", count, "Number of articles")->required();
  gen->add_option("--size-range", size_range, "Article size range in bytes, min-max");
  gen->add_option("--seed", corpus_seed, "Generator seed");
  gen->add_option("--out", corpus_out, "Output directory")->required();

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Print the summary of a sim output directory");
  report->add_option("dir", report_dir, "Directory written by sim --out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*sim_cmd) return cmd_sim(scenario, seed, out, sets, sweep, serial);
    if (*gen) return cmd_gen_corpus(count, size_range, corpus_seed, corpus_out);
    if (*report) return cmd_report(report_dir);
  } catch (const Error& e) {
    std::cerr << "dtn-learn: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "dtn-learn: " << e.what() << "\n";
    return kRuntime;
  }
  return kInvalid;
}
