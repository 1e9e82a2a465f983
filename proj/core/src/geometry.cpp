#include "rollingcache/geometry.hpp"

#include <bit>
#include <sstream>

#include "rollingcache/errors.hpp"

namespace rollingcache {

void CacheGeometry::validate() const {
  if (num_sets == 0 || !std::has_single_bit(num_sets))
    throw ConfigError("sets: must be a positive power of two (got " + std::to_string(num_sets) + ")");
  if (ways == 0) throw ConfigError("ways: must be >= 1");
  if (line_size == 0 || !std::has_single_bit(line_size))
    throw ConfigError("line-size: must be a positive power of two (got " + std::to_string(line_size) + ")");
  if (freelist_len == 0) throw ConfigError("freelist: must be >= 1");
  if (freelist_len > num_sets)
    throw ConfigError("freelist: must not exceed the number of sets (" + std::to_string(freelist_len) +
                      " > " + std::to_string(num_sets) + ")");
  if (addr_bits == 0 || addr_bits > 64) throw ConfigError("addr-bits: must be in [1, 64]");
  if (addrset_bits() + offset_bits() >= addr_bits)
    throw ConfigError("addr-bits: no tag bits left for this set count and line size");
}

std::uint32_t CacheGeometry::addrset_bits() const {
  return static_cast<std::uint32_t>(std::countr_zero(num_sets));
}

std::uint32_t CacheGeometry::offset_bits() const {
  return static_cast<std::uint32_t>(std::countr_zero(line_size));
}

Address CacheGeometry::line_address(std::uint64_t tag, SetId addrset) const {
  return recompose({tag, addrset, 0}, *this);
}

std::string CacheGeometry::describe() const {
  std::ostringstream os;
  os << "sets=" << num_sets << " ways=" << ways << " line=" << line_size << " freelist=" << freelist_len
     << " addr_bits=" << addr_bits;
  return os.str();
}

DecomposedAddress decompose(Address addr, const CacheGeometry& geom) {
  if (geom.addr_bits < 64 && (addr >> geom.addr_bits) != 0) {
    std::ostringstream os;
    os << "address 0x" << std::hex << addr << " is wider than " << std::dec << geom.addr_bits << " bits";
    throw ConfigError(os.str());
  }
  const std::uint32_t ob = geom.offset_bits();
  const std::uint32_t ab = geom.addrset_bits();
  DecomposedAddress d;
  d.offset = static_cast<std::uint32_t>(addr & (geom.line_size - 1));
  d.addrset = static_cast<SetId>((addr >> ob) & (geom.num_sets - 1));
  d.tag = addr >> (ob + ab);
  return d;
}

Address recompose(const DecomposedAddress& parts, const CacheGeometry& geom) {
  const std::uint32_t ob = geom.offset_bits();
  const std::uint32_t ab = geom.addrset_bits();
  return (parts.tag << (ob + ab)) | (Address{parts.addrset} << ob) | parts.offset;
}

}  // namespace rollingcache
