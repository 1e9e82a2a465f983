#include "rollingcache/rolling_cache.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rollingcache/errors.hpp"
#include "rollingcache/snapshot.hpp"

namespace rollingcache {

std::string_view to_string(AccessSource source) {
  switch (source) {
    case AccessSource::present_set: return "present_set";
    case AccessSource::past_set: return "past_set";
    case AccessSource::handling_register: return "handling_register";
    case AccessSource::memory: return "memory";
  }
  return "unknown";
}

namespace {

std::vector<SetId> sample_distinct(Stream& rng, std::uint32_t universe, std::uint32_t count) {
  // Partial Fisher-Yates over [0, universe).
  std::vector<SetId> ids(universe);
  std::iota(ids.begin(), ids.end(), SetId{0});
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.uniform_below(universe - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  return ids;
}

}  // namespace

RollingCache::RollingCache(const CacheGeometry& geom, std::uint64_t seed, RollingCacheOptions options,
                           Uninitialized)
    : geom_(geom),
      options_(options),
      replacement_(derive(seed, StreamLabel::replacement)),
      freelist_pick_(derive(seed, StreamLabel::freelist_pick)) {
  geom_.validate();
  entries_.resize(geom_.num_sets);
  lines_.resize(geom_.lines());
}

RollingCache::RollingCache(const CacheGeometry& geom, std::uint64_t seed, RollingCacheOptions options)
    : RollingCache(geom, seed, options, Uninitialized{}) {
  Stream mapping = derive(seed, StreamLabel::init_mapping);
  Stream counters = derive(seed, StreamLabel::init_counters);
  Stream fl = derive(seed, StreamLabel::init_freelist);

  const std::vector<SetId> perm = sample_distinct(mapping, geom_.num_sets, geom_.num_sets);
  for (SetId a = 0; a < geom_.num_sets; ++a) {
    entries_[a].present = perm[a];
    entries_[a].past = perm[a];
    entries_[a].fill_count = static_cast<std::uint32_t>(counters.uniform_below(geom_.ways));
  }
  freelist_ = sample_distinct(fl, geom_.num_sets, geom_.freelist_len);
}

RollingCache RollingCache::saturated(const CacheGeometry& geom, std::uint64_t seed, std::optional<SetId> reserved,
                                     RollingCacheOptions options) {
  RollingCache c(geom, seed, options, Uninitialized{});
  const std::uint32_t S = c.geom_.num_sets;
  if (reserved && *reserved >= S) throw ConfigError("saturated: reserved AddrSet out of range");

  Stream mapping = derive(seed, StreamLabel::init_mapping);
  Stream counters = derive(seed, StreamLabel::init_counters);
  Stream fl = derive(seed, StreamLabel::init_freelist);

  std::vector<std::uint32_t> present_refs(S, 0);
  for (SetId a = 0; a < S; ++a) {
    const auto p = static_cast<SetId>(mapping.uniform_below(S));
    c.entries_[a].present = p;
    c.entries_[a].past = p;
    ++present_refs[p];
  }

  // Cover sets that no present pointer reaches with past pointers of AddrSets
  // other than `reserved`, so every set can hold reachable lines.
  std::vector<SetId> donors;
  for (SetId a = 0; a < S; ++a)
    if (!reserved || a != *reserved) donors.push_back(a);
  for (SetId s = 0; s < S; ++s) {
    if (present_refs[s] != 0) continue;
    if (donors.empty()) throw InternalError("saturated: not enough AddrSets to cover every set");
    const auto k = mapping.uniform_below(donors.size());
    c.entries_[donors[k]].past = s;
    donors.erase(donors.begin() + static_cast<std::ptrdiff_t>(k));
  }

  for (auto& e : c.entries_) e.fill_count = static_cast<std::uint32_t>(counters.uniform_below(c.geom_.ways));
  c.freelist_ = sample_distinct(fl, S, c.geom_.freelist_len);

  std::vector<std::vector<SetId>> owners(S);
  for (SetId a = 0; a < S; ++a) {
    const auto& e = c.entries_[a];
    owners[e.present].push_back(a);
    if (e.past != e.present) owners[e.past].push_back(a);
  }
  std::uint64_t next_tag = 1;
  for (SetId s = 0; s < S; ++s) {
    std::vector<SetId> pool = owners[s];
    if (reserved && pool.size() > 1) std::erase(pool, *reserved);
    for (std::uint32_t w = 0; w < c.geom_.ways; ++w) {
      CacheLine& line = c.line_at(s, w);
      line.valid = true;
      line.dirty = false;
      line.addrset = pool[mapping.uniform_below(pool.size())];
      line.tag = next_tag++;
      line.payload = c.geom_.line_address(line.tag, line.addrset);
    }
  }
  return c;
}

RollingCache RollingCache::from_snapshot(const Snapshot& snap, std::uint64_t seed, RollingCacheOptions options) {
  RollingCache c(snap.geometry, seed, options, Uninitialized{});
  const std::uint32_t S = c.geom_.num_sets;
  if (snap.entries.size() != S) throw ConfigError("snapshot: expected one indirection entry per AddrSet");
  for (SetId a = 0; a < S; ++a) {
    const auto& e = snap.entries[a];
    if (e.present >= S || e.past >= S || e.fill_count > c.geom_.ways)
      throw ConfigError("snapshot: indirection entry " + std::to_string(a) + " out of range");
    c.entries_[a] = e;
  }
  for (SetId s : snap.freelist)
    if (s >= S) throw ConfigError("snapshot: freelist entry out of range");
  c.freelist_ = snap.freelist;
  for (const auto& h : snap.handling)
    if (h.cacheset >= S || h.addrset >= S) throw ConfigError("snapshot: handling entry out of range");
  c.handling_ = snap.handling;
  for (const auto& l : snap.lines) {
    if (l.set >= S || l.way >= c.geom_.ways || l.addrset >= S)
      throw ConfigError("snapshot: line record out of range");
    CacheLine& line = c.line_at(l.set, l.way);
    line.valid = true;
    line.dirty = l.dirty;
    line.tag = l.tag;
    line.addrset = l.addrset;
    line.payload = c.geom_.line_address(l.tag, l.addrset);
  }
  return c;
}

std::span<const CacheLine> RollingCache::set_lines(SetId cacheset) const {
  if (cacheset >= geom_.num_sets) throw std::out_of_range("cacheset out of range");
  return std::span<const CacheLine>(lines_).subspan(std::size_t{cacheset} * geom_.ways, geom_.ways);
}

std::optional<RollingCache::Location> RollingCache::locate(const DecomposedAddress& d) const {
  const IndirectionEntry& e = entries_[d.addrset];
  auto scan = [&](SetId set, AccessSource src) -> std::optional<Location> {
    for (std::uint32_t w = 0; w < geom_.ways; ++w)
      if (line_at(set, w).matches(d.tag, d.addrset)) return Location{set, w, src};
    return std::nullopt;
  };
  if (auto loc = scan(e.present, AccessSource::present_set)) return loc;
  if (e.past != e.present)
    if (auto loc = scan(e.past, AccessSource::past_set)) return loc;
  for (const auto& h : handling_) {
    if (h.addrset != d.addrset || h.cacheset == e.present || h.cacheset == e.past) continue;
    if (auto loc = scan(h.cacheset, AccessSource::handling_register)) return loc;
  }
  return std::nullopt;
}

AccessOutcome RollingCache::lookup(Address addr) const {
  const DecomposedAddress d = decompose(addr, geom_);
  AccessOutcome out;
  if (auto loc = locate(d)) {
    out.hit = true;
    out.source = loc->source;
    out.cacheset = loc->cacheset;
    out.payload = line_at(loc->cacheset, loc->way).payload;
  }
  return out;
}

AccessOutcome RollingCache::access(Address addr, AccessKind kind, std::uint64_t payload) {
  const DecomposedAddress d = decompose(addr, geom_);
  AccessOutcome out;
  ++stats_.accesses;

  if (auto loc = locate(d)) {
    ++stats_.hits;
    CacheLine& line = line_at(loc->cacheset, loc->way);
    if (kind == AccessKind::write) {
      line.payload = payload;
      line.dirty = true;
    }
    out.hit = true;
    out.source = loc->source;
    out.cacheset = loc->cacheset;
    out.payload = line.payload;
    tick_handling_register(out);
    return out;
  }

  ++stats_.misses;
  last_update_.reset();
  IndirectionEntry& e = entries_[d.addrset];
  if (e.fill_count >= geom_.ways) last_update_ = pointer_update(d.addrset, out);
  fill(e.present, d, kind == AccessKind::write, payload, out);
  ++e.fill_count;
  out.payload = payload;
  tick_handling_register(out);
  return out;
}

std::uint32_t RollingCache::pick_freelist_index(const IndirectionEntry& e) {
  // Prefer a set not already mapped to this AddrSet so the roll lands on a
  // different CacheSet; fall back to the whole list when none qualifies.
  std::uint32_t eligible = 0;
  for (SetId s : freelist_)
    if (s != e.present && s != e.past) ++eligible;
  if (eligible == 0) return static_cast<std::uint32_t>(freelist_pick_.uniform_below(freelist_.size()));
  auto k = freelist_pick_.uniform_below(eligible);
  for (std::uint32_t i = 0; i < freelist_.size(); ++i) {
    if (freelist_[i] == e.present || freelist_[i] == e.past) continue;
    if (k-- == 0) return i;
  }
  throw InternalError("freelist pick fell off the list");
}

UpdateReport RollingCache::pointer_update(SetId addrset, AccessOutcome& out) {
  // A live entry for the same AddrSet retires first so drains stay ordered.
  for (std::size_t i = 0; i < handling_.size();) {
    if (handling_[i].addrset == addrset) {
      const DrainResult r = drain_at(i);
      out.drained_invalidations += r.invalidated;
      out.drained_writebacks += r.writebacks;
    } else {
      ++i;
    }
  }
  while (freelist_.empty() && !handling_.empty()) {
    const DrainResult r = drain_at(0);
    out.drained_invalidations += r.invalidated;
    out.drained_writebacks += r.writebacks;
  }
  if (freelist_.empty()) throw InternalError("pointer update with an empty freelist");

  IndirectionEntry& e = entries_[addrset];
  UpdateReport rep;
  rep.addrset = addrset;

  const SetId temp = e.past;
  const std::uint32_t idx = pick_freelist_index(e);
  e.past = e.present;
  e.present = freelist_[idx];
  freelist_.erase(freelist_.begin() + idx);
  e.fill_count = 0;

  rep.released = temp;
  rep.new_past = e.past;
  rep.new_present = e.present;
  rep.freelist_index = idx;
  ++stats_.pointer_updates;
  out.pointer_update_fired = true;

  if (temp == e.past || temp == e.present) {
    rep.invalidation_skipped = true;
    freelist_.push_back(temp);
    return rep;
  }

  // Live for exactly drain_delay further accesses.
  HandlingRegisterEntry h{temp, addrset, 0, options_.drain_delay + 1};
  for (std::uint32_t w = 0; w < geom_.ways; ++w) {
    const CacheLine& l = line_at(temp, w);
    if (l.valid && l.addrset == addrset && l.dirty) ++h.pending_writebacks;
  }
  handling_.push_back(h);
  if (options_.drain_mode == DrainMode::synchronous || options_.drain_delay == 0) {
    rep.drained = drain_at(handling_.size() - 1);
    out.drained_invalidations += rep.drained->invalidated;
    out.drained_writebacks += rep.drained->writebacks;
  }
  return rep;
}

void RollingCache::evict_line(CacheLine& line) {
  if (line.valid && line.dirty) {
    ++stats_.writebacks;
    if (sink_) sink_(geom_.line_address(line.tag, line.addrset), line.payload);
  }
  line.valid = false;
  line.dirty = false;
}

void RollingCache::fill(SetId cacheset, const DecomposedAddress& d, bool dirty, std::uint64_t payload,
                        AccessOutcome& out) {
  std::optional<std::uint32_t> way;
  for (std::uint32_t w = 0; w < geom_.ways && !way; ++w)
    if (!line_at(cacheset, w).valid) way = w;
  if (!way) {
    way = static_cast<std::uint32_t>(replacement_.uniform_below(geom_.ways));
    CacheLine& victim = line_at(cacheset, *way);
    out.evicted = EvictedLine{victim.addrset, victim.tag, victim.dirty, victim.payload};
    out.writeback = victim.dirty;
    evict_line(victim);
  }
  CacheLine& line = line_at(cacheset, *way);
  line.valid = true;
  line.dirty = dirty;
  line.tag = d.tag;
  line.addrset = d.addrset;
  line.payload = payload;
  out.cacheset = cacheset;
}

DrainResult RollingCache::drain_at(std::size_t index) {
  const HandlingRegisterEntry h = handling_[index];
  handling_.erase(handling_.begin() + static_cast<std::ptrdiff_t>(index));
  DrainResult r;
  for (std::uint32_t w = 0; w < geom_.ways; ++w) {
    CacheLine& l = line_at(h.cacheset, w);
    if (!l.valid || l.addrset != h.addrset) continue;
    // Still reachable through the AddrSet's current pointers: keep it.
    const IndirectionEntry& e = entries_[h.addrset];
    if (h.cacheset == e.present || h.cacheset == e.past) continue;
    ++r.invalidated;
    if (l.dirty) ++r.writebacks;
    evict_line(l);
  }
  stats_.invalidations += r.invalidated;
  freelist_.push_back(h.cacheset);
  return r;
}

DrainResult RollingCache::drain(const HandlingRegisterEntry& entry) {
  for (std::size_t i = 0; i < handling_.size(); ++i) {
    if (handling_[i].cacheset == entry.cacheset && handling_[i].addrset == entry.addrset) return drain_at(i);
  }
  throw InternalError("drain: no live handling-register entry for cacheset " + std::to_string(entry.cacheset) +
                      " / addrset " + std::to_string(entry.addrset));
}

void RollingCache::drain_all() {
  while (!handling_.empty()) drain_at(0);
}

void RollingCache::tick_handling_register(AccessOutcome& out) {
  if (options_.drain_mode != DrainMode::delayed) return;
  for (std::size_t i = 0; i < handling_.size();) {
    if (handling_[i].countdown > 0) --handling_[i].countdown;
    if (handling_[i].countdown == 0) {
      const DrainResult r = drain_at(i);
      out.drained_invalidations += r.invalidated;
      out.drained_writebacks += r.writebacks;
    } else {
      ++i;
    }
  }
}

bool RollingCache::flush_line(Address addr) {
  const DecomposedAddress d = decompose(addr, geom_);
  auto loc = locate(d);
  if (!loc) return false;
  ++stats_.flushes;
  evict_line(line_at(loc->cacheset, loc->way));
  return true;
}

Snapshot RollingCache::snapshot() const {
  Snapshot s;
  s.geometry = geom_;
  s.entries = entries_;
  s.freelist = freelist_;
  s.handling = handling_;
  for (SetId set = 0; set < geom_.num_sets; ++set) {
    for (std::uint32_t w = 0; w < geom_.ways; ++w) {
      const CacheLine& l = line_at(set, w);
      if (l.valid) s.lines.push_back({set, w, l.tag, l.addrset, l.dirty});
    }
  }
  return s;
}

bool RollingCache::same_state(const RollingCache& other) const { return snapshot() == other.snapshot(); }

}  // namespace rollingcache
