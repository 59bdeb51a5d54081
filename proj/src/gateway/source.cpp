// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/gateway/source.hpp"

#include <random>

#include "dtnl/common/bytes.hpp"
#include "dtnl/common/digest.hpp"
#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/random.hpp"
#include "dtnl/common/text.hpp"

namespace dtnl::gateway {

namespace fs = std::filesystem;

std::string slugify(const std::string& topic) {
  auto t = trim(topic);
  for (auto& c : t) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) c = '-';
  }
  return t;
}

OfflineCorpus::OfflineCorpus(fs::path dir) : dir_(std::move(dir)) {}

LookupResult OfflineCorpus::lookup(const std::string& topic) {
  const auto slug = slugify(topic);
  if (slug.empty()) return LookupResult::not_found();
  const auto path = dir_ / (slug + ".txt");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    if (!fs::is_directory(dir_, ec)) return LookupResult::transient("corpus directory unavailable");
    return LookupResult::not_found();
  }
  return LookupResult::found(topic, read_text(path));
}

void MemoryCorpus::add(const std::string& topic, std::string body) { bodies_[slugify(topic)] = std::move(body); }

LookupResult MemoryCorpus::lookup(const std::string& topic) {
  auto it = bodies_.find(slugify(topic));
  if (it == bodies_.end()) return LookupResult::not_found();
  return LookupResult::found(topic, it->second);
}

namespace {

std::uint64_t topic_seed(std::uint64_t seed, const std::string& topic) {
  ByteWriter w;
  w.u64(seed);
  w.str16(slugify(topic));
  auto d = sha256(w.bytes());
  ByteReader r(d);
  return r.u64();
}

constexpr const char* kWords[] = {
    "learning", "school",   "village", "river",   "energy",   "plant",    "light",     "water",   "cell",
    "number",   "equation", "history", "language", "teacher", "student",  "network",   "signal",  "bus",
    "farm",     "market",   "health",  "science", "reading", "writing",  "carbon",    "oxygen",  "sugar",
    "leaf",     "root",     "soil",    "rain",    "season",  "harvest",  "community", "library", "map",
    "the",      "of",       "and",     "to",      "in",      "is",       "a",         "that",    "for",
    "with",     "as",       "by",      "on",      "from",    "which",    "are",       "this",    "its"};

}  // namespace

std::string synthetic_article(const std::string& title, std::uint64_t size, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::string out;
  out.reserve(size);
  out += title;
  out += "\n\n";
  constexpr std::size_t n_words = std::size(kWords);
  std::size_t in_sentence = 0;
  while (out.size() < size) {
    const char* w = kWords[rng() % n_words];
    if (in_sentence == 0) {
      out.push_back(static_cast<char>(w[0] - 'a' + 'A'));
      out += w + 1;
    } else {
      out += w;
    }
    ++in_sentence;
    if (in_sentence >= 8 + rng() % 10) {
      out += (rng() % 6 == 0) ? ".\n\n" : ". ";
      in_sentence = 0;
    } else {
      out.push_back(' ');
    }
  }
  out.resize(size);
  if (!out.empty()) out.back() = '\n';
  return out;
}

SyntheticCorpus::SyntheticCorpus(std::uint64_t seed, std::uint64_t min_size, std::uint64_t max_size)
    : seed_(seed), min_size_(min_size), max_size_(max_size) {
  if (min_size == 0 || min_size > max_size) throw Error(Errc::InvalidArgument, "bad synthetic size range");
}

std::uint64_t SyntheticCorpus::size_of(const std::string& topic) const {
  std::mt19937_64 rng(topic_seed(seed_, topic));
  return uniform_u64(rng, min_size_, max_size_);
}

LookupResult SyntheticCorpus::lookup(const std::string& topic) {
  if (slugify(topic).empty()) return LookupResult::not_found();
  return LookupResult::found(topic, synthetic_article(trim(topic), size_of(topic), topic_seed(seed_, topic) ^ 1));
}

}  // namespace dtnl::gateway
