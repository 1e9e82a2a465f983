#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rollingcache/cache_model.hpp"
#include "rollingcache/trace.hpp"

namespace rollingcache {

struct SimStats {
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t pointer_updates = 0;
  std::uint64_t invalidations = 0;
  std::uint64_t instructions = 0;

  [[nodiscard]] double mpki() const {
    return instructions == 0 ? 0.0 : static_cast<double>(misses) * 1000.0 / static_cast<double>(instructions);
  }
  [[nodiscard]] double miss_ratio() const {
    return accesses == 0 ? 0.0 : static_cast<double>(misses) / static_cast<double>(accesses);
  }
};

struct FootprintSample {
  std::uint64_t access_index = 0;
  SetId addrset = 0;
  /// Fill-target CacheSet of `addrset` right after the access.
  SetId cacheset = 0;

  bool operator==(const FootprintSample&) const = default;
};

struct FootprintWindow {
  std::uint64_t start = 0;
  std::uint64_t length = 1000;
};

struct SimResult {
  SimStats stats;
  std::vector<FootprintSample> footprint;
  /// The window extended past the end of the trace.
  bool window_truncated = false;
};

/// Drives `cache` through `trace`. Writes carry the record ordinal + 1 as
/// their payload. Throws ConfigError on an empty trace.
SimResult run_trace(CacheModel& cache, std::span<const TraceRecord> trace,
                    std::optional<FootprintWindow> window = std::nullopt);

/// Largest number of distinct AddrSets sharing one active CacheSet.
std::size_t max_addrsets_per_cacheset(std::span<const FootprintSample> samples);

void write_stats_csv(std::ostream& out, std::span<const SimStats> rows);
void write_footprint_csv(std::ostream& out, std::span<const FootprintSample> samples);

}  // namespace rollingcache
