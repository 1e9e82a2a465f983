#pragma once

#include <cstdint>
#include <string>

namespace rollingcache {

using SetId = std::uint32_t;
using Address = std::uint64_t;

/// Shape of a cache. `freelist_len` is ignored by the conventional baselines.
struct CacheGeometry {
  std::uint32_t num_sets = 2048;
  std::uint32_t ways = 16;
  std::uint32_t line_size = 64;
  std::uint32_t freelist_len = 64;
  std::uint32_t addr_bits = 48;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  [[nodiscard]] std::uint32_t addrset_bits() const;
  [[nodiscard]] std::uint32_t offset_bits() const;
  [[nodiscard]] std::uint32_t tag_bits() const { return addr_bits - addrset_bits() - offset_bits(); }
  [[nodiscard]] std::uint64_t lines() const { return std::uint64_t{num_sets} * ways; }

  /// Address of line `tag` in AddrSet `addrset` (offset 0).
  [[nodiscard]] Address line_address(std::uint64_t tag, SetId addrset) const;

  [[nodiscard]] std::string describe() const;

  bool operator==(const CacheGeometry&) const = default;
};

struct DecomposedAddress {
  std::uint64_t tag = 0;
  SetId addrset = 0;
  std::uint32_t offset = 0;

  bool operator==(const DecomposedAddress&) const = default;
};

/// Splits `addr` into tag, AddrSet index and block offset. Throws ConfigError
/// if the address does not fit in `geom.addr_bits`.
DecomposedAddress decompose(Address addr, const CacheGeometry& geom);
Address recompose(const DecomposedAddress& parts, const CacheGeometry& geom);

}  // namespace rollingcache
