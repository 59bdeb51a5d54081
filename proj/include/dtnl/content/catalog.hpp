// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtnl/common/digest.hpp"
#include "dtnl/content/app_message.hpp"

namespace dtnl::content {

struct ContentItem {
  Digest content_id{};
  std::string title;
  std::string body;
  std::uint32_t version = 1;
  Origin origin = Origin::LocalAuthor;
  Millis updated_at = 0;

  bool operator==(const ContentItem&) const = default;
};

/// SHA-256 over (str16 title, u32 version).
Digest content_id_of(const std::string& title, std::uint32_t version);

struct CatalogSummary {
  std::string title;
  std::uint32_t version = 0;
  Origin origin = Origin::LocalAuthor;
  Millis updated_at = 0;

  bool operator==(const CatalogSummary&) const = default;
};

/// Versioned article catalog. With a root directory it persists as
///   catalog.jsonl          one metadata line per version
///   bodies/<id-hex>.txt    body of each version, written before its line
/// Without one it is memory-only.
class Catalog {
 public:
  explicit Catalog(std::filesystem::path root = {}, bool sync = true);

  /// Adds a new version of `title`. With `version` unset or not above the
  /// latest, the new version is latest + 1.
  const ContentItem& add(const std::string& title, std::string body, Origin origin, Millis now,
                         std::optional<std::uint32_t> version = std::nullopt);

  /// Sorted by title; `filter` is a case-insensitive substring of the title.
  std::vector<CatalogSummary> list(const std::string& filter = {}) const;
  /// Latest version by default. Throws NotFound.
  const ContentItem& get(const std::string& title, std::optional<std::uint32_t> version = std::nullopt) const;
  const ContentItem* find(const std::string& title) const;

  std::size_t title_count() const { return items_.size(); }
  /// max updated_at over the latest versions; nullopt when empty.
  std::optional<Millis> newest_update() const;
  /// Stable text rendering of the whole catalog, for idempotence checks.
  std::string fingerprint() const;

 private:
  void load();

  std::filesystem::path root_;
  bool sync_;
  std::map<std::string, std::map<std::uint32_t, ContentItem>> items_;
};

}  // namespace dtnl::content
