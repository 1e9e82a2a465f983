#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rollingcache/geometry.hpp"
#include "rollingcache/rolling_cache.hpp"

namespace rollingcache {

/// Versioned, line-oriented dump of a RollingCache used for golden-state
/// tests:
///
///   rollingcache-snapshot 1
///   geometry <sets> <ways> <line_size> <freelist_len> <addr_bits>
///   entries <n>
///   <addrset> <present> <past> <fill_count>        (n records)
///   freelist <k> <id>...
///   handling <h>
///   <cacheset> <addrset> <pending_writebacks> <countdown>   (h records)
///   lines <m>
///   <set> <way> <tag-hex> <addrset> <dirty>         (m records, valid lines only)
///   end
struct Snapshot {
  struct Line {
    SetId set = 0;
    std::uint32_t way = 0;
    std::uint64_t tag = 0;
    SetId addrset = 0;
    bool dirty = false;

    bool operator==(const Line&) const = default;
  };

  CacheGeometry geometry;
  std::vector<IndirectionEntry> entries;
  std::vector<SetId> freelist;
  std::vector<HandlingRegisterEntry> handling;
  std::vector<Line> lines;

  bool operator==(const Snapshot&) const = default;
};

inline constexpr int kSnapshotVersion = 1;

void write_snapshot(std::ostream& os, const Snapshot& snap);
/// Throws ParseError with the offending line number.
Snapshot read_snapshot(std::istream& is);

}  // namespace rollingcache
