#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>

#include "rollingcache/rolling_cache.hpp"
#include "rollingcache/set_assoc_cache.hpp"

namespace rollingcache {

enum class ModelKind : std::uint8_t { rolling, lru, random };

std::string_view to_string(ModelKind kind);
/// Parses "rolling" | "lru" | "random"; throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

/// Runtime-selected cache model with a common access/probe surface.
class CacheModel {
 public:
  explicit CacheModel(RollingCache cache) : impl_(std::move(cache)) {}
  explicit CacheModel(SetAssocCache cache) : impl_(std::move(cache)) {}

  AccessOutcome access(Address addr, AccessKind kind = AccessKind::read, std::uint64_t payload = 0) {
    return std::visit([&](auto& c) { return c.access(addr, kind, payload); }, impl_);
  }
  [[nodiscard]] AccessOutcome lookup(Address addr) const {
    return std::visit([&](const auto& c) { return c.lookup(addr); }, impl_);
  }
  [[nodiscard]] bool contains(Address addr) const { return lookup(addr).hit; }
  bool flush_line(Address addr) {
    return std::visit([&](auto& c) { return c.flush_line(addr); }, impl_);
  }
  [[nodiscard]] const CacheGeometry& geometry() const {
    return std::visit([](const auto& c) -> const CacheGeometry& { return c.geometry(); }, impl_);
  }
  [[nodiscard]] const RollingCacheStats& stats() const {
    return std::visit([](const auto& c) -> const RollingCacheStats& { return c.stats(); }, impl_);
  }
  [[nodiscard]] ModelKind kind() const;

  /// Active (fill-target) CacheSet for `addrset`: the present pointer for a
  /// RollingCache, the identity mapping otherwise.
  [[nodiscard]] SetId active_set(SetId addrset) const;

  [[nodiscard]] RollingCache* rolling() { return std::get_if<RollingCache>(&impl_); }
  [[nodiscard]] const RollingCache* rolling() const { return std::get_if<RollingCache>(&impl_); }

 private:
  std::variant<RollingCache, SetAssocCache> impl_;
};

/// Builds a fresh model with the default randomised initial state.
CacheModel make_cache(ModelKind kind, const CacheGeometry& geom, std::uint64_t seed,
                      RollingCacheOptions options = {});

/// Produces a fresh cache for one run or trial, given that run's seed.
using CacheFactory = std::function<CacheModel(std::uint64_t seed)>;

CacheFactory default_factory(ModelKind kind, const CacheGeometry& geom, RollingCacheOptions options = {});

}  // namespace rollingcache
