#include "rollingcache/cache_model.hpp"

#include <string>

#include "rollingcache/errors.hpp"

namespace rollingcache {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::rolling: return "rolling";
    case ModelKind::lru: return "lru";
    case ModelKind::random: return "random";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "rolling") return ModelKind::rolling;
  if (name == "lru") return ModelKind::lru;
  if (name == "random") return ModelKind::random;
  throw ConfigError("model: unknown model '" + std::string(name) + "' (expected rolling, lru or random)");
}

ModelKind CacheModel::kind() const {
  if (const auto* sa = std::get_if<SetAssocCache>(&impl_))
    return sa->policy() == ReplacementPolicy::lru ? ModelKind::lru : ModelKind::random;
  return ModelKind::rolling;
}

SetId CacheModel::active_set(SetId addrset) const {
  if (const auto* rc = rolling()) return rc->entry(addrset).present;
  return addrset;
}

CacheModel make_cache(ModelKind kind, const CacheGeometry& geom, std::uint64_t seed, RollingCacheOptions options) {
  switch (kind) {
    case ModelKind::rolling: return CacheModel(RollingCache(geom, seed, options));
    case ModelKind::lru: return CacheModel(SetAssocCache(geom, ReplacementPolicy::lru, seed));
    case ModelKind::random: return CacheModel(SetAssocCache(geom, ReplacementPolicy::random, seed));
  }
  throw ConfigError("model: unknown kind");
}

CacheFactory default_factory(ModelKind kind, const CacheGeometry& geom, RollingCacheOptions options) {
  return [kind, geom, options](std::uint64_t seed) { return make_cache(kind, geom, seed, options); };
}

}  // namespace rollingcache
