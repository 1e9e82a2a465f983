#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rollingcache/geometry.hpp"

namespace rollingcache {

enum class AccessKind : std::uint8_t { read, write };

enum class AccessSource : std::uint8_t { present_set, past_set, handling_register, memory };

std::string_view to_string(AccessSource source);

struct CacheLine {
  bool valid = false;
  bool dirty = false;
  std::uint64_t tag = 0;
  SetId addrset = 0;
  /// Identifies the memory contents held by the line; only tests look at it.
  std::uint64_t payload = 0;

  [[nodiscard]] bool matches(std::uint64_t t, SetId a) const { return valid && tag == t && addrset == a; }
};

struct EvictedLine {
  SetId addrset = 0;
  std::uint64_t tag = 0;
  bool dirty = false;
  std::uint64_t payload = 0;
};

/// Result of a lookup or access. A hit never fires a pointer update.
struct AccessOutcome {
  bool hit = false;
  AccessSource source = AccessSource::memory;
  /// CacheSet that serviced the hit or received the fill.
  SetId cacheset = 0;
  std::uint64_t payload = 0;
  std::optional<EvictedLine> evicted;
  bool pointer_update_fired = false;
  /// The fill evicted a dirty line.
  bool writeback = false;
  /// Lines invalidated and written back by handling-register drains during
  /// this access.
  std::uint32_t drained_invalidations = 0;
  std::uint32_t drained_writebacks = 0;
};

}  // namespace rollingcache
