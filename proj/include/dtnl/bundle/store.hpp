// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "dtnl/bundle/bundle.hpp"
#include "dtnl/bundle/range_set.hpp"

namespace dtnl {

inline constexpr std::uint64_t kDefaultChunkSize = 64 * 1024;
inline constexpr std::uint64_t kDefaultStoreQuota = 4ull << 30;
inline constexpr std::uint8_t kStoreFormatVersion = 0x01;

struct StoreOptions {
  std::filesystem::path root;
  std::uint64_t quota = kDefaultStoreQuota;
  std::uint64_t chunk_size = kDefaultChunkSize;
  std::uint64_t max_payload = kDefaultMaxPayload;
  /// Partials have no header until complete; they are collected after this.
  Millis partial_ttl = kDefaultBundleTtl;
  /// fsync payload files and the journal before returning. The simulator
  /// turns this off; crash-safety guarantees then hold only for process
  /// kills, not power loss.
  bool sync = true;
};

enum class PutResult { Inserted, Duplicate };

/// What a receiver knows about a bundle before it is complete (from MANIFEST).
struct PartialMeta {
  BundleId id{};
  std::uint64_t total_len = 0;
  NodeId destination;
  BundleKind kind = BundleKind::ContentUpdate;
  Priority priority = Priority::Content;
};

struct StoreEntry {
  enum class State { Complete, Partial };

  State state = State::Partial;
  std::optional<BundleHeader> header;  // set iff Complete
  PartialMeta meta;                    // always set; derived from header when Complete
  RangeSet received;                   // Partial only
  Millis received_at = 0;

  bool complete() const { return state == State::Complete; }
  std::uint64_t image_len() const { return meta.total_len; }
};

/// Result of finishing a partial entry.
enum class CompleteResult { Completed, AlreadyComplete, Incomplete, VerificationFailed };

/// Persistent bundle store. Layout under `root`:
///   <id-hex>.payload   bundle image (header block + payload)
///   index.journal      append-only record log, CRC32 per record
/// Released ids (custody handed off) are kept as tombstones until expiry.
/// Single-writer: the owner serializes all mutations.
class BundleStore {
 public:
  static BundleStore open(StoreOptions options);

  BundleStore(BundleStore&&) noexcept;
  BundleStore& operator=(BundleStore&&) noexcept;
  ~BundleStore();

  PutResult put(const Bundle& bundle, Millis now);

  /// Creates (or returns the existing) partial entry for an incoming bundle.
  /// Throws StorageFull if the full image would exceed the quota.
  const StoreEntry& begin_partial(const PartialMeta& meta, Millis now);
  /// Writes one chunk-aligned piece of an incoming image. The chunk is durable
  /// (data then journal record) on return.
  void write_chunk(const BundleId& id, std::uint64_t offset, ByteView data);
  /// Verifies the received image and promotes the entry to Complete.
  CompleteResult complete(const BundleId& id, Millis now);

  std::vector<BundleId> expire(Millis now);
  /// Complete, unexpired ids by (priority desc, created_at asc, id asc).
  std::vector<BundleId> offer_queue(Millis now) const;
  bool remove(const BundleId& id);
  /// Removes a complete bundle after custody hand-off and keeps a tombstone
  /// until the bundle would have expired, so a re-offer is seen as a duplicate.
  bool release(const BundleId& id);
  bool was_released(const BundleId& id) const;
  const std::map<BundleId, Millis>& released() const { return released_; }

  const StoreEntry* find(const BundleId& id) const;
  bool has_complete(const BundleId& id) const;
  std::optional<Bundle> get(const BundleId& id) const;
  Bytes read_image(const BundleId& id, std::uint64_t offset, std::uint64_t len) const;

  const std::map<BundleId, StoreEntry>& entries() const { return index_; }
  std::size_t size() const { return index_.size(); }
  std::uint64_t used_bytes() const { return used_; }
  std::uint64_t quota() const { return options_.quota; }
  std::uint64_t free_bytes() const { return used_ >= options_.quota ? 0 : options_.quota - used_; }
  const StoreOptions& options() const { return options_; }

  /// Journal records seen while loading (for audits and tests).
  struct JournalStats {
    std::size_t records = 0;
    std::size_t torn_bytes_dropped = 0;
    std::size_t chunks_dropped = 0;
  };
  const JournalStats& load_stats() const { return load_stats_; }

 private:
  explicit BundleStore(StoreOptions options);
  void load();
  void compact();
  std::filesystem::path payload_path(const BundleId& id) const;
  void append_record(std::uint8_t type, const Bytes& body);
  void charge(std::uint64_t bytes);

  StoreOptions options_;
  std::map<BundleId, StoreEntry> index_;
  std::map<BundleId, Millis> released_;  // id -> forget_at
  std::uint64_t used_ = 0;
  int journal_fd_ = -1;
  JournalStats load_stats_;
};

/// One decoded journal record, for offline inspection of a store directory.
struct JournalRecord {
  enum class Type : std::uint8_t { Put = 1, Partial = 2, Chunk = 3, Complete = 4, Remove = 5, Release = 6 };
  Type type;
  BundleId id{};
};

/// Reads every intact record of `root/index.journal` without modifying it.
std::vector<JournalRecord> read_journal(const std::filesystem::path& root);

}  // namespace dtnl
