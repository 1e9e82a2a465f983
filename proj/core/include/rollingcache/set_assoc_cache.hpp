#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rollingcache/access.hpp"
#include "rollingcache/geometry.hpp"
#include "rollingcache/rng.hpp"
#include "rollingcache/rolling_cache.hpp"

namespace rollingcache {

enum class ReplacementPolicy : std::uint8_t { lru, random };

std::string_view to_string(ReplacementPolicy policy);

/// Conventional set-associative cache: AddrSet i lives only in CacheSet i.
/// LRU keeps a 64-bit access stamp per line; random evicts uniformly among
/// valid lines once the set is full (invalid ways fill first, lowest way
/// first).
class SetAssocCache {
 public:
  SetAssocCache(const CacheGeometry& geom, ReplacementPolicy policy, std::uint64_t seed);

  [[nodiscard]] AccessOutcome lookup(Address addr) const;
  [[nodiscard]] bool contains(Address addr) const { return lookup(addr).hit; }
  AccessOutcome access(Address addr, AccessKind kind = AccessKind::read, std::uint64_t payload = 0);
  bool flush_line(Address addr);

  [[nodiscard]] const CacheGeometry& geometry() const { return geom_; }
  [[nodiscard]] ReplacementPolicy policy() const { return policy_; }
  [[nodiscard]] std::span<const CacheLine> set_lines(SetId set) const;
  /// LRU stamps of `set` (all zero under random replacement).
  [[nodiscard]] std::span<const std::uint64_t> set_stamps(SetId set) const;
  [[nodiscard]] const RollingCacheStats& stats() const { return stats_; }

  Stream& replacement_stream() { return replacement_; }
  void set_writeback_sink(WritebackSink sink) { sink_ = std::move(sink); }

 private:
  [[nodiscard]] std::optional<std::uint32_t> find_way(SetId set, std::uint64_t tag) const;
  std::size_t slot(SetId set, std::uint32_t way) const { return std::size_t{set} * geom_.ways + way; }

  CacheGeometry geom_;
  ReplacementPolicy policy_;
  std::vector<CacheLine> lines_;
  std::vector<std::uint64_t> stamps_;
  std::uint64_t clock_ = 0;
  Stream replacement_;
  RollingCacheStats stats_;
  WritebackSink sink_;
};

}  // namespace rollingcache
