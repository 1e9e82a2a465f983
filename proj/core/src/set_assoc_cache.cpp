#include "rollingcache/set_assoc_cache.hpp"

#include <algorithm>

namespace rollingcache {

std::string_view to_string(ReplacementPolicy policy) {
  return policy == ReplacementPolicy::lru ? "lru" : "random";
}

SetAssocCache::SetAssocCache(const CacheGeometry& geom, ReplacementPolicy policy, std::uint64_t seed)
    : geom_(geom), policy_(policy), replacement_(derive(seed, StreamLabel::replacement)) {
  geom_.validate();
  lines_.resize(geom_.lines());
  stamps_.resize(geom_.lines(), 0);
}

std::span<const CacheLine> SetAssocCache::set_lines(SetId set) const {
  return std::span<const CacheLine>(lines_).subspan(slot(set, 0), geom_.ways);
}

std::span<const std::uint64_t> SetAssocCache::set_stamps(SetId set) const {
  return std::span<const std::uint64_t>(stamps_).subspan(slot(set, 0), geom_.ways);
}

std::optional<std::uint32_t> SetAssocCache::find_way(SetId set, std::uint64_t tag) const {
  for (std::uint32_t w = 0; w < geom_.ways; ++w)
    if (lines_[slot(set, w)].matches(tag, set)) return w;
  return std::nullopt;
}

AccessOutcome SetAssocCache::lookup(Address addr) const {
  const DecomposedAddress d = decompose(addr, geom_);
  AccessOutcome out;
  if (auto w = find_way(d.addrset, d.tag)) {
    out.hit = true;
    out.source = AccessSource::present_set;
    out.cacheset = d.addrset;
    out.payload = lines_[slot(d.addrset, *w)].payload;
  }
  return out;
}

AccessOutcome SetAssocCache::access(Address addr, AccessKind kind, std::uint64_t payload) {
  const DecomposedAddress d = decompose(addr, geom_);
  const SetId set = d.addrset;
  AccessOutcome out;
  out.cacheset = set;
  ++stats_.accesses;

  if (auto w = find_way(set, d.tag)) {
    ++stats_.hits;
    CacheLine& line = lines_[slot(set, *w)];
    if (kind == AccessKind::write) {
      line.payload = payload;
      line.dirty = true;
    }
    if (policy_ == ReplacementPolicy::lru) stamps_[slot(set, *w)] = ++clock_;
    out.hit = true;
    out.source = AccessSource::present_set;
    out.payload = line.payload;
    return out;
  }

  ++stats_.misses;
  std::optional<std::uint32_t> way;
  for (std::uint32_t w = 0; w < geom_.ways && !way; ++w)
    if (!lines_[slot(set, w)].valid) way = w;
  if (!way) {
    if (policy_ == ReplacementPolicy::lru) {
      auto stamps = set_stamps(set);
      way = static_cast<std::uint32_t>(std::min_element(stamps.begin(), stamps.end()) - stamps.begin());
    } else {
      way = static_cast<std::uint32_t>(replacement_.uniform_below(geom_.ways));
    }
    CacheLine& victim = lines_[slot(set, *way)];
    out.evicted = EvictedLine{victim.addrset, victim.tag, victim.dirty, victim.payload};
    out.writeback = victim.dirty;
    if (victim.dirty) {
      ++stats_.writebacks;
      if (sink_) sink_(geom_.line_address(victim.tag, victim.addrset), victim.payload);
    }
  }
  CacheLine& line = lines_[slot(set, *way)];
  line = CacheLine{true, kind == AccessKind::write, d.tag, set, payload};
  if (policy_ == ReplacementPolicy::lru) stamps_[slot(set, *way)] = ++clock_;
  out.payload = payload;
  return out;
}

bool SetAssocCache::flush_line(Address addr) {
  const DecomposedAddress d = decompose(addr, geom_);
  auto w = find_way(d.addrset, d.tag);
  if (!w) return false;
  CacheLine& line = lines_[slot(d.addrset, *w)];
  if (line.dirty) {
    ++stats_.writebacks;
    if (sink_) sink_(geom_.line_address(line.tag, line.addrset), line.payload);
  }
  line = CacheLine{};
  stamps_[slot(d.addrset, *w)] = 0;
  ++stats_.flushes;
  return true;
}

}  // namespace rollingcache
