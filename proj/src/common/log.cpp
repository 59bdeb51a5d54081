// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace dtnl::log {
namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: break;
  }
  return "";
}
}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level l, std::string_view message) {
  if (l < g_level.load() || l == Level::Off) return;
  std::lock_guard lock(g_mutex);
  std::fprintf(stderr, "[%s] %.*s\n", tag(l), static_cast<int>(message.size()), message.data());
}

}  // namespace dtnl::log
