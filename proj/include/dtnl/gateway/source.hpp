// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

namespace dtnl::gateway {

struct LookupResult {
  enum class Kind { Found, NotFound, TransientError };
  Kind kind = Kind::NotFound;
  std::string title;
  std::string body;
  std::string message;

  static LookupResult found(std::string title, std::string body) {
    return {Kind::Found, std::move(title), std::move(body), {}};
  }
  static LookupResult not_found() { return {Kind::NotFound, {}, {}, {}}; }
  static LookupResult transient(std::string why) { return {Kind::TransientError, {}, {}, std::move(why)}; }
};

/// Where the gateway gets articles from.
class ArticleSource {
 public:
  virtual ~ArticleSource() = default;
  virtual LookupResult lookup(const std::string& topic) = 0;
};

/// Corpus file name stem: trimmed topic, ASCII lowercased, every byte that is
/// not [a-z0-9] replaced by '-'.
std::string slugify(const std::string& topic);

/// `<dir>/<slug>.txt`, UTF-8 text. The article title is the topic.
class OfflineCorpus : public ArticleSource {
 public:
  explicit OfflineCorpus(std::filesystem::path dir);
  LookupResult lookup(const std::string& topic) override;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// In-memory topic -> body map keyed by slug.
class MemoryCorpus : public ArticleSource {
 public:
  void add(const std::string& topic, std::string body);
  LookupResult lookup(const std::string& topic) override;

 private:
  std::map<std::string, std::string> bodies_;
};

/// Deterministic synthetic articles: every topic exists, its body is a pure
/// function of (seed, topic) with a length uniform in [min_size, max_size].
class SyntheticCorpus : public ArticleSource {
 public:
  SyntheticCorpus(std::uint64_t seed, std::uint64_t min_size, std::uint64_t max_size);
  LookupResult lookup(const std::string& topic) override;

  std::uint64_t size_of(const std::string& topic) const;

 private:
  std::uint64_t seed_;
  std::uint64_t min_size_;
  std::uint64_t max_size_;
};

/// Plain-text article of exactly `size` bytes drawn from `rng_seed`.
std::string synthetic_article(const std::string& title, std::uint64_t size, std::uint64_t rng_seed);

/// Source whose answers are scripted per call (tests).
class ScriptedSource : public ArticleSource {
 public:
  using Script = std::function<LookupResult(const std::string& topic, int call)>;
  explicit ScriptedSource(Script script) : script_(std::move(script)) {}
  LookupResult lookup(const std::string& topic) override { return script_(topic, calls_++); }
  int calls() const { return calls_; }

 private:
  Script script_;
  int calls_ = 0;
};

/// Online encyclopedia client; only built with DTNL_ENABLE_LIVE_FETCH.
std::unique_ptr<ArticleSource> make_live_source(const std::string& base_url);

}  // namespace dtnl::gateway
