#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rollingcache/access.hpp"
#include "rollingcache/geometry.hpp"
#include "rollingcache/rng.hpp"

namespace rollingcache {

struct Snapshot;

/// Per-AddrSet indirection: fills go to `present`, lookups also consult
/// `past`. `fill_count` is the number of fills into the current present set.
struct IndirectionEntry {
  SetId present = 0;
  SetId past = 0;
  std::uint32_t fill_count = 0;

  bool operator==(const IndirectionEntry&) const = default;
};

/// A CacheSet released by a pointer update whose lines for `addrset` have not
/// been invalidated yet. Lookups for `addrset` still see those lines.
struct HandlingRegisterEntry {
  SetId cacheset = 0;
  SetId addrset = 0;
  std::uint32_t pending_writebacks = 0;
  /// Accesses left before the entry drains (delayed mode only).
  std::uint32_t countdown = 0;

  bool operator==(const HandlingRegisterEntry&) const = default;
};

struct DrainResult {
  std::uint32_t invalidated = 0;
  std::uint32_t writebacks = 0;

  bool operator==(const DrainResult&) const = default;
};

struct UpdateReport {
  SetId addrset = 0;
  SetId released = 0;      ///< old past set ("temp")
  SetId new_past = 0;      ///< old present set
  SetId new_present = 0;   ///< picked from the freelist
  std::uint32_t freelist_index = 0;
  /// temp is still mapped to the AddrSet, so nothing had to be invalidated.
  bool invalidation_skipped = false;
  /// Set when the entry was drained inside the update (synchronous mode).
  std::optional<DrainResult> drained;
};

enum class DrainMode : std::uint8_t { synchronous, delayed };

struct RollingCacheOptions {
  DrainMode drain_mode = DrainMode::synchronous;
  /// Delayed mode: number of subsequent accesses an entry stays live.
  std::uint32_t drain_delay = 4;
};

struct RollingCacheStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t pointer_updates = 0;
  std::uint64_t invalidations = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t flushes = 0;
};

/// Receives (line address, payload) for every dirty line leaving the cache.
using WritebackSink = std::function<void(Address, std::uint64_t)>;

/// Set-indirected cache whose AddrSet-to-CacheSet mapping rolls to a new
/// CacheSet after every W fills. Single-threaded; copies are independent.
class RollingCache {
 public:
  /// Randomised initial state: present pointers are a random permutation,
  /// past == present, fill counts uniform in [0, W), freelist holds F distinct
  /// sets, all lines invalid.
  RollingCache(const CacheGeometry& geom, std::uint64_t seed, RollingCacheOptions options = {});

  /// Warm start with every line valid and reachable. Present pointers are
  /// drawn i.i.d. uniform; sets no present pointer reaches are given to some
  /// AddrSet other than `reserved` as its past set, and `reserved` keeps
  /// past == present. Fill counts and freelist are drawn as in the default
  /// constructor. This is the state the closed-form attack analysis assumes.
  static RollingCache saturated(const CacheGeometry& geom, std::uint64_t seed,
                                std::optional<SetId> reserved = std::nullopt,
                                RollingCacheOptions options = {});

  /// Restores the state recorded in `snap`. Line payloads are set to the
  /// line address; random streams are derived from `seed`.
  static RollingCache from_snapshot(const Snapshot& snap, std::uint64_t seed,
                                    RollingCacheOptions options = {});

  /// Non-mutating lookup; `cacheset` names the set holding the line on a hit.
  [[nodiscard]] AccessOutcome lookup(Address addr) const;
  [[nodiscard]] bool contains(Address addr) const { return lookup(addr).hit; }

  /// Performs a read or write. `payload` is the memory contents for a read
  /// fill and the new data for a write.
  AccessOutcome access(Address addr, AccessKind kind = AccessKind::read, std::uint64_t payload = 0);

  /// Invalidates the line if cached (writing it back when dirty). Pointers and
  /// fill counts are left untouched.
  bool flush_line(Address addr);

  /// Invalidates `entry.addrset`'s lines in `entry.cacheset`, retires the
  /// entry and appends the set to the freelist tail. Throws InternalError if
  /// the entry is not live.
  DrainResult drain(const HandlingRegisterEntry& entry);
  void drain_all();

  [[nodiscard]] const CacheGeometry& geometry() const { return geom_; }
  [[nodiscard]] const RollingCacheOptions& options() const { return options_; }
  [[nodiscard]] const IndirectionEntry& entry(SetId addrset) const { return entries_.at(addrset); }
  [[nodiscard]] std::span<const IndirectionEntry> entries() const { return entries_; }
  [[nodiscard]] std::span<const SetId> freelist() const { return freelist_; }
  [[nodiscard]] std::span<const HandlingRegisterEntry> handling_register() const { return handling_; }
  [[nodiscard]] std::span<const CacheLine> set_lines(SetId cacheset) const;
  [[nodiscard]] const RollingCacheStats& stats() const { return stats_; }
  [[nodiscard]] const std::optional<UpdateReport>& last_update() const { return last_update_; }

  /// Streams exposed so tests can pin them.
  Stream& replacement_stream() { return replacement_; }
  Stream& freelist_stream() { return freelist_pick_; }

  void set_writeback_sink(WritebackSink sink) { sink_ = std::move(sink); }

  [[nodiscard]] Snapshot snapshot() const;

  /// Same geometry, pointers, freelist, handling register and lines.
  [[nodiscard]] bool same_state(const RollingCache& other) const;

 private:
  struct Uninitialized {};
  RollingCache(const CacheGeometry& geom, std::uint64_t seed, RollingCacheOptions options, Uninitialized);

  struct Location {
    SetId cacheset;
    std::uint32_t way;
    AccessSource source;
  };

  [[nodiscard]] std::optional<Location> locate(const DecomposedAddress& d) const;
  CacheLine& line_at(SetId cacheset, std::uint32_t way) { return lines_[std::size_t{cacheset} * geom_.ways + way]; }
  [[nodiscard]] const CacheLine& line_at(SetId cacheset, std::uint32_t way) const {
    return lines_[std::size_t{cacheset} * geom_.ways + way];
  }

  UpdateReport pointer_update(SetId addrset, AccessOutcome& out);
  std::uint32_t pick_freelist_index(const IndirectionEntry& e);
  void fill(SetId cacheset, const DecomposedAddress& d, bool dirty, std::uint64_t payload, AccessOutcome& out);
  void evict_line(CacheLine& line);
  void tick_handling_register(AccessOutcome& out);
  DrainResult drain_at(std::size_t index);

  CacheGeometry geom_;
  RollingCacheOptions options_;
  std::vector<IndirectionEntry> entries_;
  std::vector<SetId> freelist_;
  std::vector<HandlingRegisterEntry> handling_;
  std::vector<CacheLine> lines_;
  Stream replacement_;
  Stream freelist_pick_;
  RollingCacheStats stats_;
  std::optional<UpdateReport> last_update_;
  WritebackSink sink_;
};

}  // namespace rollingcache
