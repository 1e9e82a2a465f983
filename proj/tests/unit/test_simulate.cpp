#include <gtest/gtest.h>

#include <sstream>

#include "rollingcache/errors.hpp"
#include "rollingcache/simulate.hpp"

namespace rc = rollingcache;

namespace {

rc::CacheGeometry geom() {
  rc::CacheGeometry g;
  g.num_sets = 64;
  g.ways = 4;
  g.freelist_len = 16;
  return g;
}

const rc::ModelKind kAll[] = {rc::ModelKind::rolling, rc::ModelKind::lru, rc::ModelKind::random};

std::string first_two_lines(const std::string& s) {
  const auto a = s.find('\n');
  const auto b = s.find('\n', a + 1);
  return s.substr(0, b);
}

}  // namespace

TEST(Simulate, RepeatedAddressMissesOnce) {
  const rc::Trace t(500, rc::TraceRecord{rc::AccessKind::read, 0x4040, 2});
  for (auto k : kAll) {
    auto c = rc::make_cache(k, geom(), 3);
    const auto r = rc::run_trace(c, t);
    EXPECT_EQ(r.stats.accesses, 500u);
    EXPECT_EQ(r.stats.misses, 1u) << rc::to_string(k);
    EXPECT_EQ(r.stats.hits, 499u);
    EXPECT_EQ(r.stats.instructions, 1000u);
    EXPECT_DOUBLE_EQ(r.stats.mpki(), 1.0);
  }
}

TEST(Simulate, HugeUniformFootprintMissesAlmostAlways) {
  rc::SyntheticSpec s;
  s.kind = rc::SyntheticKind::uniform_random;
  s.length = 20000;
  s.footprint_lines = std::uint64_t{1} << 30;
  const auto t = rc::gen_synthetic(s, geom(), 2);
  for (auto k : kAll) {
    auto c = rc::make_cache(k, geom(), 3);
    EXPECT_GT(rc::run_trace(c, t).stats.miss_ratio(), 0.99) << rc::to_string(k);
  }
}

TEST(Simulate, EmptyTraceIsAnError) {
  auto c = rc::make_cache(rc::ModelKind::lru, geom(), 1);
  EXPECT_THROW(rc::run_trace(c, {}), rc::ConfigError);
}

TEST(Simulate, WritesProduceWritebacks) {
  rc::SyntheticSpec s;
  s.kind = rc::SyntheticKind::conflict_storm;
  s.length = 1000;
  s.distinct = 12;
  s.write_fraction = 1.0;
  const auto t = rc::gen_synthetic(s, geom(), 1);
  for (auto k : kAll) {
    auto c = rc::make_cache(k, geom(), 3);
    EXPECT_GT(rc::run_trace(c, t).stats.writebacks, 0u) << rc::to_string(k);
  }
}

TEST(Simulate, SameSeedSameStats) {
  const auto t = rc::conflict_storm_suite(geom(), 1, 512);
  for (auto k : kAll) {
    auto a = rc::make_cache(k, geom(), 7);
    auto b = rc::make_cache(k, geom(), 7);
    const auto ra = rc::run_trace(a, t), rb = rc::run_trace(b, t);
    EXPECT_EQ(ra.stats.misses, rb.stats.misses);
    EXPECT_EQ(ra.stats.pointer_updates, rb.stats.pointer_updates);
  }
}

TEST(Footprint, RollingCacheSharesCacheSetsUnderConflict) {
  const auto t = rc::conflict_storm_suite(geom(), 1, 512);
  auto c = rc::make_cache(rc::ModelKind::rolling, geom(), 1);
  const auto r = rc::run_trace(c, t, rc::FootprintWindow{0, 1000});
  EXPECT_EQ(r.footprint.size(), 1000u);
  EXPECT_GE(rc::max_addrsets_per_cacheset(r.footprint), 2u);
}

TEST(Footprint, BaselinesAreOneToOne) {
  rc::SyntheticSpec s;
  s.kind = rc::SyntheticKind::mixed;
  s.length = 3000;
  const auto t = rc::gen_synthetic(s, geom(), 1);
  for (auto k : {rc::ModelKind::lru, rc::ModelKind::random}) {
    auto c = rc::make_cache(k, geom(), 1);
    const auto r = rc::run_trace(c, t, rc::FootprintWindow{});
    EXPECT_EQ(rc::max_addrsets_per_cacheset(r.footprint), 1u);
    for (const auto& f : r.footprint) EXPECT_EQ(f.addrset, f.cacheset);
  }
}

TEST(Footprint, WindowPastEndIsTruncated) {
  const rc::Trace t(10, rc::TraceRecord{});
  auto c = rc::make_cache(rc::ModelKind::lru, geom(), 1);
  const auto r = rc::run_trace(c, t, rc::FootprintWindow{5, 100});
  EXPECT_TRUE(r.window_truncated);
  ASSERT_EQ(r.footprint.size(), 5u);
  EXPECT_EQ(r.footprint.front().access_index, 5u);
}

TEST(Csv, HeadersAreFixed) {
  std::ostringstream a, b;
  rc::SimStats s;
  s.model = "lru";
  rc::write_stats_csv(a, std::span(&s, 1));
  EXPECT_EQ(first_two_lines(a.str()),
            "# rng=xoshiro256** (splitmix64-seeded)\n"
            "model,seed,accesses,hits,misses,mpki,miss_ratio,pointer_updates,writebacks");
  rc::write_footprint_csv(b, {});
  EXPECT_EQ(b.str(), "# rng=xoshiro256** (splitmix64-seeded)\naccess_index,addrset,cacheset\n");
}
