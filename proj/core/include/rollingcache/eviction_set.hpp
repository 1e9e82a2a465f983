#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rollingcache/cache_model.hpp"

namespace rollingcache {

/// True if accessing `target`, then every address in `candidates`, makes the
/// next access to `target` miss. The timing signal is the hit/miss of that
/// final access.
bool evicts(CacheModel& cache, Address target, std::span<const Address> candidates);

struct EvictionSetOptions {
  /// Re-tests of a found set; the set is stable only if every one evicts.
  std::uint32_t reverify = 10;
  /// Upper bound on eviction tests before giving up.
  std::uint64_t max_tests = 1'000'000;
};

enum class EvictionSetStatus : std::uint8_t { found, pool_insufficient, reduction_stuck, test_budget_exhausted };

std::string_view to_string(EvictionSetStatus status);

struct EvictionSetResult {
  EvictionSetStatus status = EvictionSetStatus::pool_insufficient;
  std::vector<Address> addresses;
  std::uint64_t tests = 0;
  std::uint32_t reverify_trials = 0;
  std::uint32_t reverify_successes = 0;

  [[nodiscard]] bool found() const { return status == EvictionSetStatus::found; }
  /// A found set that evicted the target on every re-test.
  [[nodiscard]] bool stable() const { return found() && reverify_successes == reverify_trials; }
  [[nodiscard]] double reverify_rate() const {
    return reverify_trials == 0 ? 0.0 : static_cast<double>(reverify_successes) / reverify_trials;
  }
};

/// Group-testing reduction: split the working set into W+1 groups and drop
/// any group whose removal still evicts the target, until W addresses remain.
/// Addresses in the same line as `target` are excluded from the pool.
EvictionSetResult build_eviction_set(CacheModel& cache, Address target, std::span<const Address> pool,
                                     const EvictionSetOptions& options = {});

}  // namespace rollingcache
