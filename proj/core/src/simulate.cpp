#include "rollingcache/simulate.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#include "rollingcache/errors.hpp"
#include "rollingcache/rng.hpp"

namespace rollingcache {

SimResult run_trace(CacheModel& cache, std::span<const TraceRecord> trace, std::optional<FootprintWindow> window) {
  if (trace.empty()) throw ConfigError("trace is empty");
  const CacheGeometry& geom = cache.geometry();
  const RollingCacheStats before = cache.stats();

  SimResult res;
  res.stats.model = std::string(to_string(cache.kind()));
  std::uint64_t window_end = 0;
  if (window) {
    window_end = window->start + window->length;
    res.window_truncated = window_end > trace.size();
    res.footprint.reserve(std::min<std::uint64_t>(window->length, trace.size()));
  }

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    cache.access(r.address, r.kind, r.kind == AccessKind::write ? i + 1 : 0);
    res.stats.instructions += r.instr_delta;
    if (window && i >= window->start && i < window_end) {
      const SetId a = decompose(r.address, geom).addrset;
      res.footprint.push_back({i, a, cache.active_set(a)});
    }
  }

  const RollingCacheStats& after = cache.stats();
  res.stats.accesses = after.accesses - before.accesses;
  res.stats.hits = after.hits - before.hits;
  res.stats.misses = after.misses - before.misses;
  res.stats.writebacks = after.writebacks - before.writebacks;
  res.stats.pointer_updates = after.pointer_updates - before.pointer_updates;
  res.stats.invalidations = after.invalidations - before.invalidations;
  return res;
}

std::size_t max_addrsets_per_cacheset(std::span<const FootprintSample> samples) {
  std::map<SetId, std::set<SetId>> users;
  for (const auto& s : samples) users[s.cacheset].insert(s.addrset);
  std::size_t best = 0;
  for (const auto& [set, addrsets] : users) best = std::max(best, addrsets.size());
  return best;
}

void write_stats_csv(std::ostream& out, std::span<const SimStats> rows) {
  out << "# rng=" << kRngAlgorithm << '\n';
  out << "model,seed,accesses,hits,misses,mpki,miss_ratio,pointer_updates,writebacks\n";
  for (const auto& s : rows) {
    out << s.model << ',' << s.seed << ',' << s.accesses << ',' << s.hits << ',' << s.misses << ','
        << std::fixed << std::setprecision(6) << s.mpki() << ',' << s.miss_ratio() << std::defaultfloat << ','
        << s.pointer_updates << ',' << s.writebacks << '\n';
  }
}

void write_footprint_csv(std::ostream& out, std::span<const FootprintSample> samples) {
  out << "# rng=" << kRngAlgorithm << '\n';
  out << "access_index,addrset,cacheset\n";
  for (const auto& s : samples) out << s.access_index << ',' << s.addrset << ',' << s.cacheset << '\n';
}

}  // namespace rollingcache
