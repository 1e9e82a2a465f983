#include "rollingcache/eviction_set.hpp"

#include <algorithm>

namespace rollingcache {

std::string_view to_string(EvictionSetStatus status) {
  switch (status) {
    case EvictionSetStatus::found: return "found";
    case EvictionSetStatus::pool_insufficient: return "pool_insufficient";
    case EvictionSetStatus::reduction_stuck: return "reduction_stuck";
    case EvictionSetStatus::test_budget_exhausted: return "test_budget_exhausted";
  }
  return "unknown";
}

bool evicts(CacheModel& cache, Address target, std::span<const Address> candidates) {
  cache.access(target);
  for (Address a : candidates) cache.access(a);
  return !cache.access(target).hit;
}

EvictionSetResult build_eviction_set(CacheModel& cache, Address target, std::span<const Address> pool,
                                     const EvictionSetOptions& options) {
  const CacheGeometry& g = cache.geometry();
  const Address target_line = target >> g.offset_bits();

  std::vector<Address> working;
  working.reserve(pool.size());
  for (Address a : pool)
    if ((a >> g.offset_bits()) != target_line) working.push_back(a);

  EvictionSetResult res;
  auto test = [&](std::span<const Address> set) {
    ++res.tests;
    return evicts(cache, target, set);
  };

  if (working.size() < g.ways || !test(working)) {
    res.status = EvictionSetStatus::pool_insufficient;
    return res;
  }

  const std::size_t groups = std::size_t{g.ways} + 1;
  std::vector<Address> rest;
  while (working.size() > g.ways) {
    if (res.tests >= options.max_tests) {
      res.status = EvictionSetStatus::test_budget_exhausted;
      res.addresses = std::move(working);
      return res;
    }
    const std::size_t n = working.size();
    bool reduced = false;
    for (std::size_t k = 0; k < groups && !reduced; ++k) {
      const std::size_t lo = n * k / groups;
      const std::size_t hi = n * (k + 1) / groups;
      if (lo == hi) continue;
      rest.clear();
      rest.insert(rest.end(), working.begin(), working.begin() + static_cast<std::ptrdiff_t>(lo));
      rest.insert(rest.end(), working.begin() + static_cast<std::ptrdiff_t>(hi), working.end());
      if (rest.size() >= g.ways && test(rest)) {
        working.swap(rest);
        reduced = true;
      }
    }
    if (!reduced) {
      res.status = EvictionSetStatus::reduction_stuck;
      res.addresses = std::move(working);
      return res;
    }
  }

  res.status = EvictionSetStatus::found;
  res.addresses = std::move(working);
  for (std::uint32_t i = 0; i < options.reverify; ++i) {
    ++res.reverify_trials;
    if (test(res.addresses)) ++res.reverify_successes;
  }
  return res;
}

}  // namespace rollingcache
