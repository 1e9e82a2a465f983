#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rollingcache/access.hpp"
#include "rollingcache/geometry.hpp"

namespace rollingcache {

struct TraceRecord {
  AccessKind kind = AccessKind::read;
  Address address = 0;
  /// Instructions retired since the previous record; always >= 1.
  std::uint64_t instr_delta = 1;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

/// Reads `R|W <hex-address> <instr_delta>` lines. `#` starts a comment; blank
/// lines are skipped. Throws ParseError carrying the 1-based line number.
Trace parse_trace(std::istream& in);
Trace parse_trace(std::string_view text);

void write_trace(std::ostream& out, std::span<const TraceRecord> trace);

enum class SyntheticKind : std::uint8_t { sequential, strided, uniform_random, conflict_storm, mixed };

std::string_view to_string(SyntheticKind kind);
/// Throws ConfigError on an unknown name.
SyntheticKind parse_synthetic_kind(std::string_view name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::sequential;
  std::uint64_t length = 0;
  Address base = 0;
  /// strided: distance between records, in lines.
  std::uint64_t stride_lines = 1;
  /// uniform_random, mixed: lines drawn from [base, base + footprint).
  std::uint64_t footprint_lines = 1 << 16;
  /// conflict_storm: AddrSet every record maps to.
  SetId addrset = 0;
  /// conflict_storm: number of distinct lines cycled through; 0 means
  /// `length` (every record a new line).
  std::uint64_t distinct = 0;
  /// conflict_storm: draw each record uniformly from the distinct lines
  /// instead of cycling in order.
  bool shuffled = false;
  /// mixed: number of hot AddrSets and the share of records aimed at them.
  std::uint32_t hot_sets = 8;
  double hot_fraction = 0.5;
  /// Probability that a record is a write.
  double write_fraction = 0.0;
  std::uint64_t instr_delta = 1;
};

/// Deterministic under `seed`. Throws ConfigError for an empty length, a zero
/// stride, an out-of-range AddrSet or fractions outside [0, 1].
Trace gen_synthetic(const SyntheticSpec& spec, const CacheGeometry& geom, std::uint64_t seed);

/// Round-robin merge; per-trace order is preserved and shorter traces simply
/// drop out. Throws ConfigError on an empty list.
Trace interleave(std::span<const Trace> traces);

/// Conflict-heavy workload set used for the miss-count comparison: storms of
/// W+1, 3W/2+1 and 2W lines (cyclic and shuffled) over several AddrSets,
/// interleaved with a light uniform background.
Trace conflict_storm_suite(const CacheGeometry& geom, std::uint64_t seed, std::uint64_t length_per_storm = 4096);

}  // namespace rollingcache
