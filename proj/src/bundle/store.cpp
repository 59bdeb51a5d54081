// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/bundle/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <system_error>

#include "dtnl/common/error.hpp"
#include "dtnl/common/log.hpp"

namespace dtnl {

namespace fs = std::filesystem;

namespace {

constexpr char kJournalName[] = "index.journal";
constexpr std::uint8_t kJournalMagic[4] = {'D', 'T', 'L', 'J'};
constexpr std::size_t kJournalHeaderLen = 5;
constexpr std::size_t kCompactMinRecords = 4096;

using RecordType = JournalRecord::Type;

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(Errc::IoFailure, what + ": " + std::strerror(errno));
}

class Fd {
 public:
  Fd(const fs::path& p, int flags, mode_t mode = 0644) : fd_(::open(p.c_str(), flags | O_CLOEXEC, mode)) {
    if (fd_ < 0) io_fail("open " + p.string());
  }
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

void write_all_at(int fd, ByteView data, std::uint64_t offset) {
  std::size_t done = 0;
  while (done < data.size()) {
    auto n = ::pwrite(fd, data.data() + done, data.size() - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("pwrite");
    }
    done += static_cast<std::size_t>(n);
  }
}

void write_all(int fd, ByteView data) {
  std::size_t done = 0;
  while (done < data.size()) {
    auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write");
    }
    done += static_cast<std::size_t>(n);
  }
}

std::size_t read_at(int fd, std::uint8_t* out, std::size_t len, std::uint64_t offset) {
  std::size_t done = 0;
  while (done < len) {
    auto n = ::pread(fd, out + done, len - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("pread");
    }
    if (n == 0) break;
    done += static_cast<std::size_t>(n);
  }
  return done;
}

void sync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

Bytes frame_record(RecordType type, const Bytes& body) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.u8(static_cast<std::uint8_t>(type));
  w.raw(body);
  auto crc = crc32(ByteView(w.bytes()).subspan(4));
  w.u32(crc);
  return w.take();
}

struct RawRecord {
  RecordType type;
  ByteView body;
};

/// Parses records until the first torn or corrupt one. Returns the byte
/// offset just past the last intact record.
std::size_t parse_records(ByteView data, std::vector<RawRecord>& out) {
  std::size_t pos = kJournalHeaderLen;
  while (pos < data.size()) {
    ByteReader r(data.subspan(pos));
    auto len = r.u32();
    if (!r.ok() || r.remaining() < std::size_t{len} + 5) break;
    auto type = r.u8();
    auto body = r.raw(len);
    auto crc = r.u32();
    if (crc != crc32(data.subspan(pos + 4, std::size_t{len} + 1))) break;
    if (type < 1 || type > 6) break;
    out.push_back({static_cast<RecordType>(type), body});
    pos += std::size_t{len} + 9;
  }
  return pos;
}

Bytes read_file(const fs::path& p) {
  Bytes data;
  std::error_code ec;
  auto size = fs::file_size(p, ec);
  if (ec) return data;
  Fd fd(p, O_RDONLY);
  data.resize(size);
  data.resize(read_at(fd.get(), data.data(), data.size(), 0));
  return data;
}

BundleId read_id(ByteReader& r) {
  BundleId id{};
  auto raw = r.raw(32);
  if (r.ok()) std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

PartialMeta meta_of(const BundleHeader& h) {
  return {h.id, image_length(h), h.destination, h.kind, h.priority};
}

}  // namespace

BundleStore::BundleStore(StoreOptions options) : options_(std::move(options)) {}

BundleStore::BundleStore(BundleStore&& o) noexcept
    : options_(std::move(o.options_)),
      index_(std::move(o.index_)),
      released_(std::move(o.released_)),
      used_(o.used_),
      journal_fd_(std::exchange(o.journal_fd_, -1)),
      load_stats_(o.load_stats_) {}

BundleStore& BundleStore::operator=(BundleStore&& o) noexcept {
  if (this != &o) {
    if (journal_fd_ >= 0) ::close(journal_fd_);
    options_ = std::move(o.options_);
    index_ = std::move(o.index_);
    released_ = std::move(o.released_);
    used_ = o.used_;
    journal_fd_ = std::exchange(o.journal_fd_, -1);
    load_stats_ = o.load_stats_;
  }
  return *this;
}

BundleStore::~BundleStore() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
}

BundleStore BundleStore::open(StoreOptions options) {
  if (options.chunk_size == 0) throw Error(Errc::InvalidArgument, "chunk size must be positive");
  std::error_code ec;
  fs::create_directories(options.root, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create store root " + options.root.string());
  BundleStore store(std::move(options));
  store.load();
  return store;
}

fs::path BundleStore::payload_path(const BundleId& id) const {
  return options_.root / (to_hex(id) + ".payload");
}

void BundleStore::load() {
  const auto journal_path = options_.root / kJournalName;
  Bytes data = read_file(journal_path);
  bool fresh = data.size() < kJournalHeaderLen ||
               !std::equal(std::begin(kJournalMagic), std::end(kJournalMagic), data.begin());
  if (!fresh && data[4] != kStoreFormatVersion)
    throw Error(Errc::IoFailure, "unsupported store format version " + std::to_string(data[4]));

  std::vector<RawRecord> records;
  std::size_t good_end = kJournalHeaderLen;
  if (!fresh) good_end = parse_records(data, records);
  load_stats_.records = records.size();
  load_stats_.torn_bytes_dropped = fresh ? data.size() : data.size() - good_end;

  for (const auto& rec : records) {
    ByteReader r(rec.body);
    switch (rec.type) {
      case RecordType::Put:
      case RecordType::Complete: {
        if (rec.type == RecordType::Complete) read_id(r);
        auto rest = rec.body.subspan(r.position());
        auto decoded = decode_header_block(rest);
        if (!decoded) break;
        ByteReader tail(rest.subspan(decoded->block_len));
        StoreEntry e;
        e.state = StoreEntry::State::Complete;
        e.header = decoded->header;
        e.meta = meta_of(decoded->header);
        e.received_at = tail.i64();
        index_[decoded->header.id] = std::move(e);
        break;
      }
      case RecordType::Partial: {
        StoreEntry e;
        e.meta.id = read_id(r);
        e.meta.total_len = r.u64();
        auto dest = r.str16();
        e.meta.kind = static_cast<BundleKind>(r.u8());
        e.meta.priority = static_cast<Priority>(r.u8());
        e.received_at = r.i64();
        if (!r.ok() || dest.empty()) break;
        e.meta.destination = NodeId(std::move(dest));
        index_[e.meta.id] = std::move(e);
        break;
      }
      case RecordType::Chunk: {
        auto id = read_id(r);
        auto offset = r.u64();
        auto len = r.u32();
        auto data_crc = r.u32();
        auto it = index_.find(id);
        if (!r.ok() || it == index_.end() || it->second.complete()) break;
        // The record is written after the data; re-check the data anyway so a
        // chunk whose bytes never reached the disk is dropped, not trusted.
        Bytes buf(len);
        std::error_code ec;
        bool ok = false;
        if (fs::exists(payload_path(id), ec)) {
          Fd fd(payload_path(id), O_RDONLY);
          ok = read_at(fd.get(), buf.data(), len, offset) == len && crc32(buf) == data_crc;
        }
        if (ok) {
          it->second.received.add({offset, offset + len});
        } else {
          ++load_stats_.chunks_dropped;
        }
        break;
      }
      case RecordType::Remove: {
        index_.erase(read_id(r));
        break;
      }
      case RecordType::Release: {
        auto id = read_id(r);
        auto forget_at = r.i64();
        if (!r.ok()) break;
        index_.erase(id);
        released_[id] = forget_at;
        break;
      }
    }
  }

  // Drop complete entries whose image is missing or short.
  for (auto it = index_.begin(); it != index_.end();) {
    std::error_code ec;
    auto size = fs::file_size(payload_path(it->first), ec);
    if (it->second.complete() && (ec || size != it->second.image_len())) {
      log::warn("store: dropping complete entry with damaged image " + to_hex(it->first));
      it = index_.erase(it);
    } else {
      ++it;
    }
  }

  // Remove orphaned payload files.
  for (const auto& de : fs::directory_iterator(options_.root)) {
    auto name = de.path().filename().string();
    if (name.size() != 64 + 8 || de.path().extension() != ".payload") continue;
    auto id = bundle_id_from_hex(name.substr(0, 64));
    if (!id || !index_.count(*id)) fs::remove(de.path());
  }

  used_ = 0;
  for (const auto& [id, e] : index_) used_ += e.image_len();

  // Rewrite the journal: drop the torn tail, or compact if mostly dead.
  const bool compactable =
      records.size() > kCompactMinRecords && records.size() > 4 * (index_.size() + released_.size());
  if (fresh || compactable) {
    compact();
  } else {
    if (good_end != data.size()) {
      if (::truncate(journal_path.c_str(), static_cast<off_t>(good_end)) != 0) io_fail("truncate journal");
    }
    journal_fd_ = ::open(journal_path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (journal_fd_ < 0) io_fail("open journal");
  }

  // A kill between the last chunk record and the completion record leaves a
  // fully covered partial; finish it now.
  std::vector<BundleId> covered;
  for (const auto& [id, e] : index_)
    if (!e.complete() && e.received.covers(e.image_len())) covered.push_back(id);
  for (const auto& id : covered) complete(id, index_.at(id).received_at);
}

void BundleStore::compact() {
  const auto journal_path = options_.root / kJournalName;
  const auto tmp_path = options_.root / "index.journal.tmp";
  {
    Fd fd(tmp_path, O_WRONLY | O_CREAT | O_TRUNC);
    Bytes out(std::begin(kJournalMagic), std::end(kJournalMagic));
    out.push_back(kStoreFormatVersion);
    for (const auto& [id, e] : index_) {
      if (e.complete()) {
        ByteWriter w;
        w.raw(encode_header_block(*e.header));
        w.i64(e.received_at);
        auto rec = frame_record(RecordType::Put, w.bytes());
        out.insert(out.end(), rec.begin(), rec.end());
        continue;
      }
      ByteWriter w;
      w.raw(id);
      w.u64(e.meta.total_len);
      w.str16(e.meta.destination.str());
      w.u8(static_cast<std::uint8_t>(e.meta.kind));
      w.u8(static_cast<std::uint8_t>(e.meta.priority));
      w.i64(e.received_at);
      auto rec = frame_record(RecordType::Partial, w.bytes());
      out.insert(out.end(), rec.begin(), rec.end());
      if (e.received.empty()) continue;
      Fd payload(payload_path(id), O_RDONLY);
      for (const auto& range : e.received.ranges()) {
        for (auto off = range.begin; off < range.end; off += options_.chunk_size) {
          auto len = std::min<std::uint64_t>(options_.chunk_size, range.end - off);
          Bytes buf(len);
          read_at(payload.get(), buf.data(), len, off);
          ByteWriter cw;
          cw.raw(id);
          cw.u64(off);
          cw.u32(static_cast<std::uint32_t>(len));
          cw.u32(crc32(buf));
          auto crec = frame_record(RecordType::Chunk, cw.bytes());
          out.insert(out.end(), crec.begin(), crec.end());
        }
      }
    }
    for (const auto& [id, forget_at] : released_) {
      ByteWriter w;
      w.raw(id);
      w.i64(forget_at);
      auto rec = frame_record(RecordType::Release, w.bytes());
      out.insert(out.end(), rec.begin(), rec.end());
    }
    write_all(fd.get(), out);
    if (options_.sync && ::fsync(fd.get()) != 0) io_fail("fsync journal");
  }
  fs::rename(tmp_path, journal_path);
  if (options_.sync) sync_dir(options_.root);
  if (journal_fd_ >= 0) ::close(journal_fd_);
  journal_fd_ = ::open(journal_path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (journal_fd_ < 0) io_fail("open journal");
}

void BundleStore::append_record(std::uint8_t type, const Bytes& body) {
  // One write() per record: a kill leaves either the whole record or a
  // prefix that fails the CRC on reload.
  write_all(journal_fd_, frame_record(static_cast<RecordType>(type), body));
  if (options_.sync && ::fdatasync(journal_fd_) != 0) io_fail("fdatasync journal");
}

void BundleStore::charge(std::uint64_t bytes) {
  if (used_ + bytes > options_.quota)
    throw Error(Errc::StorageFull, "store quota exceeded: used " + std::to_string(used_) + " + " +
                                       std::to_string(bytes) + " > " + std::to_string(options_.quota));
}

PutResult BundleStore::put(const Bundle& bundle, Millis now) {
  const auto& h = bundle.header;
  if (h.ttl <= 0) throw Error(Errc::ZeroTtl, "bundle ttl must be positive");
  if (h.payload_len != bundle.payload.size())
    throw Error(Errc::InvalidArgument, "payload_len does not match payload");
  auto it = index_.find(h.id);
  if (it != index_.end() && it->second.complete()) return PutResult::Duplicate;

  Bytes image = encode_image(bundle);
  std::uint64_t previously = it != index_.end() ? it->second.image_len() : 0;
  if (used_ - previously + image.size() > options_.quota)
    throw Error(Errc::StorageFull, "store quota exceeded: used " + std::to_string(used_) + " + " +
                                       std::to_string(image.size()) + " > " + std::to_string(options_.quota));

  const auto path = payload_path(h.id);
  const auto tmp = options_.root / (to_hex(h.id) + ".tmp");
  {
    Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
    write_all(fd.get(), image);
    if (options_.sync && ::fsync(fd.get()) != 0) io_fail("fsync payload");
  }
  fs::rename(tmp, path);
  if (options_.sync) sync_dir(options_.root);

  ByteWriter w;
  w.raw(encode_header_block(h));
  w.i64(now);
  append_record(static_cast<std::uint8_t>(RecordType::Put), w.bytes());

  StoreEntry e;
  e.state = StoreEntry::State::Complete;
  e.header = h;
  e.meta = meta_of(h);
  e.received_at = now;
  used_ = used_ - previously + image.size();
  index_[h.id] = std::move(e);
  return PutResult::Inserted;
}

const StoreEntry& BundleStore::begin_partial(const PartialMeta& meta, Millis now) {
  auto it = index_.find(meta.id);
  if (it != index_.end()) return it->second;
  if (meta.total_len == 0) throw Error(Errc::InvalidArgument, "partial bundle with zero length");
  charge(meta.total_len);

  ByteWriter w;
  w.raw(meta.id);
  w.u64(meta.total_len);
  w.str16(meta.destination.str());
  w.u8(static_cast<std::uint8_t>(meta.kind));
  w.u8(static_cast<std::uint8_t>(meta.priority));
  w.i64(now);
  {
    Fd fd(payload_path(meta.id), O_WRONLY | O_CREAT | O_TRUNC);
  }
  append_record(static_cast<std::uint8_t>(RecordType::Partial), w.bytes());

  StoreEntry e;
  e.meta = meta;
  e.received_at = now;
  used_ += meta.total_len;
  return index_[meta.id] = std::move(e);
}

void BundleStore::write_chunk(const BundleId& id, std::uint64_t offset, ByteView data) {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::NotFound, "no partial entry for " + to_hex(id));
  auto& e = it->second;
  if (e.complete()) return;
  const auto total = e.image_len();
  const auto expected = std::min<std::uint64_t>(options_.chunk_size, total > offset ? total - offset : 0);
  if (offset % options_.chunk_size != 0 || offset >= total || data.size() != expected)
    throw Error(Errc::InvalidArgument, "chunk not aligned to the store's chunk grid");
  if (e.received.contains({offset, offset + data.size()})) return;

  {
    Fd fd(payload_path(id), O_WRONLY);
    write_all_at(fd.get(), data, offset);
    if (options_.sync && ::fdatasync(fd.get()) != 0) io_fail("fdatasync payload");
  }
  ByteWriter w;
  w.raw(id);
  w.u64(offset);
  w.u32(static_cast<std::uint32_t>(data.size()));
  w.u32(crc32(data));
  append_record(static_cast<std::uint8_t>(RecordType::Chunk), w.bytes());
  e.received.add({offset, offset + data.size()});
}

CompleteResult BundleStore::complete(const BundleId& id, Millis now) {
  auto it = index_.find(id);
  if (it == index_.end()) return CompleteResult::Incomplete;
  auto& e = it->second;
  if (e.complete()) return CompleteResult::AlreadyComplete;
  if (!e.received.covers(e.image_len())) return CompleteResult::Incomplete;

  std::optional<BundleHeader> verified;
  {
    Fd fd(payload_path(id), O_RDONLY);
    Bytes head(std::min<std::uint64_t>(4096, e.image_len()));
    read_at(fd.get(), head.data(), head.size(), 0);
    auto decoded = decode_header_block(head);
    if (decoded && decoded->header.id == id &&
        decoded->block_len + decoded->header.payload_len == e.image_len()) {
      Sha256 hasher;
      Bytes buf(1 << 20);
      std::uint64_t off = decoded->block_len;
      while (off < e.image_len()) {
        auto n = read_at(fd.get(), buf.data(), std::min<std::uint64_t>(buf.size(), e.image_len() - off), off);
        if (n == 0) break;
        hasher.update(ByteView(buf).first(n));
        off += n;
      }
      const auto& h = decoded->header;
      if (off == e.image_len() && hasher.finish() == h.payload_digest &&
          compute_bundle_id(h.source, h.destination, h.created_at, h.payload_digest) == id)
        verified = h;
    }
  }

  if (!verified) {
    log::warn("store: image verification failed for " + to_hex(id) + "; restarting transfer");
    e.received.clear();
    ByteWriter w;
    w.raw(id);
    w.u64(e.meta.total_len);
    w.str16(e.meta.destination.str());
    w.u8(static_cast<std::uint8_t>(e.meta.kind));
    w.u8(static_cast<std::uint8_t>(e.meta.priority));
    w.i64(e.received_at);
    append_record(static_cast<std::uint8_t>(RecordType::Partial), w.bytes());
    return CompleteResult::VerificationFailed;
  }

  ByteWriter w;
  w.raw(id);
  w.raw(encode_header_block(*verified));
  w.i64(now);
  append_record(static_cast<std::uint8_t>(RecordType::Complete), w.bytes());
  e.state = StoreEntry::State::Complete;
  e.header = verified;
  e.meta = meta_of(*verified);
  e.received = RangeSet{};
  e.received_at = now;
  return CompleteResult::Completed;
}

std::vector<BundleId> BundleStore::expire(Millis now) {
  std::vector<BundleId> gone;
  for (const auto& [id, e] : index_) {
    bool dead = e.complete() ? e.header->expired(now) : now >= e.received_at + options_.partial_ttl;
    if (dead) gone.push_back(id);
  }
  for (const auto& id : gone) remove(id);
  // Tombstones are only forgotten in memory; compaction drops them from disk.
  std::erase_if(released_, [now](const auto& kv) { return now >= kv.second; });
  return gone;
}

std::vector<BundleId> BundleStore::offer_queue(Millis now) const {
  std::vector<const BundleHeader*> live;
  for (const auto& [id, e] : index_)
    if (e.complete() && !e.header->expired(now)) live.push_back(&*e.header);
  std::sort(live.begin(), live.end(), [](const BundleHeader* a, const BundleHeader* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    if (a->created_at != b->created_at) return a->created_at < b->created_at;
    return a->id < b->id;
  });
  std::vector<BundleId> out;
  out.reserve(live.size());
  for (const auto* h : live) out.push_back(h->id);
  return out;
}

bool BundleStore::remove(const BundleId& id) {
  auto it = index_.find(id);
  if (it == index_.end()) return false;
  ByteWriter w;
  w.raw(id);
  append_record(static_cast<std::uint8_t>(RecordType::Remove), w.bytes());
  std::error_code ec;
  fs::remove(payload_path(id), ec);
  used_ -= it->second.image_len();
  index_.erase(it);
  return true;
}

bool BundleStore::release(const BundleId& id) {
  auto it = index_.find(id);
  if (it == index_.end() || !it->second.complete()) return false;
  const auto forget_at = it->second.header->expires_at();
  ByteWriter w;
  w.raw(id);
  w.i64(forget_at);
  append_record(static_cast<std::uint8_t>(RecordType::Release), w.bytes());
  std::error_code ec;
  fs::remove(payload_path(id), ec);
  used_ -= it->second.image_len();
  index_.erase(it);
  released_[id] = forget_at;
  return true;
}

bool BundleStore::was_released(const BundleId& id) const { return released_.count(id) != 0; }

const StoreEntry* BundleStore::find(const BundleId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &it->second;
}

bool BundleStore::has_complete(const BundleId& id) const {
  const auto* e = find(id);
  return e && e->complete();
}

std::optional<Bundle> BundleStore::get(const BundleId& id) const {
  const auto* e = find(id);
  if (!e || !e->complete()) return std::nullopt;
  Bytes image = read_image(id, 0, e->image_len());
  auto decoded = decode_header_block(image);
  if (!decoded) return std::nullopt;
  Bundle b;
  b.header = *e->header;
  b.payload.assign(image.begin() + static_cast<std::ptrdiff_t>(decoded->block_len), image.end());
  return b;
}

Bytes BundleStore::read_image(const BundleId& id, std::uint64_t offset, std::uint64_t len) const {
  const auto* e = find(id);
  if (!e) throw Error(Errc::NotFound, "no bundle " + to_hex(id));
  if (offset > e->image_len()) throw Error(Errc::InvalidArgument, "read past end of image");
  len = std::min(len, e->image_len() - offset);
  Bytes out(len);
  Fd fd(payload_path(id), O_RDONLY);
  if (read_at(fd.get(), out.data(), len, offset) != len) throw Error(Errc::IoFailure, "short read of image");
  return out;
}

std::vector<JournalRecord> read_journal(const fs::path& root) {
  Bytes data = read_file(root / kJournalName);
  std::vector<JournalRecord> out;
  if (data.size() < kJournalHeaderLen) return out;
  std::vector<RawRecord> records;
  parse_records(data, records);
  for (const auto& rec : records) {
    JournalRecord jr{rec.type, {}};
    if (rec.type == RecordType::Put) {
      if (auto d = decode_header_block(rec.body)) jr.id = d->header.id;
    } else {
      ByteReader r(rec.body);
      jr.id = read_id(r);
    }
    out.push_back(jr);
  }
  return out;
}

}  // namespace dtnl
