// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/content/catalog.hpp"

#include <algorithm>
#include <json.hpp>

#include "dtnl/common/bytes.hpp"
#include "dtnl/common/error.hpp"
#include "dtnl/common/files.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl::content {

namespace fs = std::filesystem;
using nlohmann::json;

Digest content_id_of(const std::string& title, std::uint32_t version) {
  ByteWriter w;
  w.str16(title);
  w.u32(version);
  return sha256(w.bytes());
}

Catalog::Catalog(fs::path root, bool sync) : root_(std::move(root)), sync_(sync) {
  if (root_.empty()) return;
  fs::create_directories(root_ / "bodies");
  load();
}

void Catalog::load() {
  for (const auto& line : read_lines(root_ / "catalog.jsonl")) {
    try {
      auto j = json::parse(line);
      ContentItem item;
      item.title = j.at("title").get<std::string>();
      item.version = j.at("version").get<std::uint32_t>();
      item.origin = parse_origin(j.at("origin").get<std::string>());
      item.updated_at = j.at("updated_at").get<Millis>();
      item.content_id = content_id_of(item.title, item.version);
      auto body_path = root_ / "bodies" / (to_hex(item.content_id) + ".txt");
      if (!fs::exists(body_path)) {
        log::warn("catalog: body missing for " + item.title);
        continue;
      }
      item.body = read_text(body_path);
      items_[item.title][item.version] = std::move(item);
    } catch (const std::exception& e) {
      log::warn(std::string("catalog: skipping bad line: ") + e.what());
    }
  }
}

const ContentItem& Catalog::add(const std::string& title, std::string body, Origin origin, Millis now,
                                std::optional<std::uint32_t> version) {
  if (title.empty()) throw Error(Errc::EmptyTitle, "title is empty");
  auto& versions = items_[title];
  const std::uint32_t latest = versions.empty() ? 0 : versions.rbegin()->first;
  const std::uint32_t v = version && *version > latest ? *version : latest + 1;

  ContentItem item;
  item.title = title;
  item.version = v;
  item.body = std::move(body);
  item.origin = origin;
  item.updated_at = now;
  item.content_id = content_id_of(title, v);

  if (!root_.empty()) {
    write_file_atomic(root_ / "bodies" / (to_hex(item.content_id) + ".txt"), item.body, sync_);
    json j = {{"title", title}, {"version", v}, {"origin", to_string(origin)}, {"updated_at", now}};
    append_line(root_ / "catalog.jsonl", j.dump(), sync_);
  }
  return versions[v] = std::move(item);
}

std::vector<CatalogSummary> Catalog::list(const std::string& filter) const {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  const auto needle = lower(filter);
  std::vector<CatalogSummary> out;
  for (const auto& [title, versions] : items_) {
    if (versions.empty()) continue;
    if (!needle.empty() && lower(title).find(needle) == std::string::npos) continue;
    const auto& latest = versions.rbegin()->second;
    out.push_back({title, latest.version, latest.origin, latest.updated_at});
  }
  return out;
}

const ContentItem& Catalog::get(const std::string& title, std::optional<std::uint32_t> version) const {
  auto it = items_.find(title);
  if (it == items_.end() || it->second.empty()) throw Error(Errc::NotFound, "no content titled '" + title + "'");
  if (!version) return it->second.rbegin()->second;
  auto v = it->second.find(*version);
  if (v == it->second.end())
    throw Error(Errc::NotFound, "no version " + std::to_string(*version) + " of '" + title + "'");
  return v->second;
}

const ContentItem* Catalog::find(const std::string& title) const {
  auto it = items_.find(title);
  if (it == items_.end() || it->second.empty()) return nullptr;
  return &it->second.rbegin()->second;
}

std::optional<Millis> Catalog::newest_update() const {
  std::optional<Millis> best;
  for (const auto& [title, versions] : items_)
    if (!versions.empty()) best = std::max(best.value_or(versions.rbegin()->second.updated_at),
                                           versions.rbegin()->second.updated_at);
  return best;
}

std::string Catalog::fingerprint() const {
  std::string out;
  for (const auto& [title, versions] : items_)
    for (const auto& [v, item] : versions)
      out += title + "\t" + std::to_string(v) + "\t" + to_string(item.origin) + "\t" +
             std::to_string(item.updated_at) + "\t" + to_hex(sha256(as_bytes(item.body))) + "\n";
  return out;
}

}  // namespace dtnl::content
