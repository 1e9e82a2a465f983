#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "invariants.hpp"
#include "rollingcache/errors.hpp"
#include "rollingcache/rolling_cache.hpp"
#include "rollingcache/snapshot.hpp"

namespace rc = rollingcache;

namespace {

rc::CacheGeometry geom(std::uint32_t sets = 16, std::uint32_t ways = 2, std::uint32_t fl = 2) {
  rc::CacheGeometry g;
  g.num_sets = sets;
  g.ways = ways;
  g.freelist_len = fl;
  return g;
}

// Identity mapping with fill_count 0 unless overridden; freelist as given.
rc::Snapshot identity_state(const rc::CacheGeometry& g, std::vector<rc::SetId> freelist) {
  rc::Snapshot s;
  s.geometry = g;
  for (rc::SetId a = 0; a < g.num_sets; ++a) s.entries.push_back({a, a, 0});
  s.freelist = std::move(freelist);
  return s;
}

rc::Address line(const rc::CacheGeometry& g, rc::SetId addrset, std::uint64_t tag) {
  return g.line_address(tag, addrset);
}

}  // namespace

TEST(RollingCache, EmptyCacheMisses) {
  const rc::RollingCache c(geom(), 1);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto out = c.lookup(line(geom(), t % 16, t));
    EXPECT_FALSE(out.hit);
    EXPECT_EQ(out.source, rc::AccessSource::memory);
  }
}

TEST(RollingCache, ReadYourWrite) {
  rc::RollingCache c(geom(), 1);
  const auto x = line(geom(), 5, 77);
  c.access(x, rc::AccessKind::write, 1234);
  const auto out = c.lookup(x);
  EXPECT_TRUE(out.hit);
  EXPECT_EQ(out.source, rc::AccessSource::present_set);
  EXPECT_EQ(out.payload, 1234u);
}

TEST(RollingCache, SecondAccessHits) {
  rc::RollingCache c(geom(), 1);
  const auto x = line(geom(), 3, 9);
  EXPECT_FALSE(c.access(x).hit);
  const auto second = c.access(x);
  EXPECT_TRUE(second.hit);
  EXPECT_FALSE(second.pointer_update_fired);
}

TEST(RollingCache, UpdateFiresOnMissAfterWFills) {
  const auto g = geom(16, 2, 2);
  auto c = rc::RollingCache::from_snapshot(identity_state(g, {10, 11}), 1);
  EXPECT_FALSE(c.access(line(g, 3, 1)).pointer_update_fired);
  EXPECT_FALSE(c.access(line(g, 3, 2)).pointer_update_fired);
  EXPECT_EQ(c.entry(3).fill_count, 2u);
  const auto third = c.access(line(g, 3, 3));
  EXPECT_TRUE(third.pointer_update_fired);
  EXPECT_EQ(c.entry(3).fill_count, 1u);
  // The first window is now reached through the past pointer.
  for (std::uint64_t t : {1, 2}) {
    const auto out = c.lookup(line(g, 3, t));
    EXPECT_TRUE(out.hit);
    EXPECT_EQ(out.source, rc::AccessSource::past_set);
  }
}

TEST(RollingCache, HitsDoNotConsumeTheCounter) {
  const auto g = geom(16, 4, 2);
  auto c = rc::RollingCache::from_snapshot(identity_state(g, {10, 11}), 1);
  for (std::uint64_t t = 1; t <= 4; ++t) c.access(line(g, 6, t));
  for (int rep = 0; rep < 20; ++rep)
    for (std::uint64_t t = 1; t <= 4; ++t) ASSERT_TRUE(c.access(line(g, 6, t)).hit);
  EXPECT_EQ(c.entry(6).fill_count, 4u);
  EXPECT_EQ(c.stats().pointer_updates, 0u);
  EXPECT_TRUE(c.access(line(g, 6, 99)).pointer_update_fired);
}

TEST(RollingCache, TwoRolloversDropTheFirstWindow) {
  const auto g = geom(16, 2, 2);
  auto c = rc::RollingCache::from_snapshot(identity_state(g, {10, 11}), 1);
  int updates = 0;
  for (std::uint64_t t = 1; t <= 5; ++t) updates += c.access(line(g, 3, t)).pointer_update_fired;
  EXPECT_EQ(updates, 2);
  EXPECT_FALSE(c.contains(line(g, 3, 1)));
  EXPECT_FALSE(c.contains(line(g, 3, 2)));
  EXPECT_TRUE(c.contains(line(g, 3, 3)));
  EXPECT_TRUE(c.contains(line(g, 3, 4)));
  EXPECT_TRUE(c.contains(line(g, 3, 5)));
}

TEST(RollingCache, RollsFromKToLToI) {
  const auto g = geom(16, 2, 2);
  constexpr rc::SetId A = 0, K = 3, L = 7, I = 9;
  auto s = identity_state(g, {L, I});
  s.entries[A] = {K, K, 0};
  auto c = rc::RollingCache::from_snapshot(s, 1);
  c.freelist_stream().pin({0, 0});

  c.access(line(g, A, 1));
  c.access(line(g, A, 2));
  ASSERT_TRUE(c.access(line(g, A, 3)).pointer_update_fired);
  EXPECT_EQ(c.entry(A).present, L);
  EXPECT_EQ(c.entry(A).past, K);
  EXPECT_TRUE(c.last_update()->invalidation_skipped);

  c.access(line(g, A, 4));
  ASSERT_TRUE(c.access(line(g, A, 5)).pointer_update_fired);
  EXPECT_EQ(c.entry(A).present, I);
  EXPECT_EQ(c.entry(A).past, L);
  EXPECT_EQ(c.last_update()->released, K);
  EXPECT_EQ(c.freelist().back(), K);
  for (const auto& l : c.set_lines(K)) EXPECT_FALSE(l.valid && l.addrset == A);
}

TEST(RollingCache, FreelistScenarioMatchesFigure) {
  // AddrSets A..H are ids 0..7. B maps present 2 / past 3, F maps 6 / 8.
  const auto g = geom(16, 2, 2);
  constexpr rc::SetId B = 1, F = 5;
  auto s = identity_state(g, {5, 4});
  s.entries[B] = {2, 3, 2};
  s.entries[F] = {6, 8, 2};
  auto c = rc::RollingCache::from_snapshot(s, 1);
  const auto before = s.entries;

  c.freelist_stream().pin(0);  // entry "5"
  ASSERT_TRUE(c.access(line(g, B, 1)).pointer_update_fired);
  EXPECT_EQ(c.entry(B).present, 5u);
  EXPECT_EQ(c.entry(B).past, 2u);
  EXPECT_EQ(std::vector<rc::SetId>(c.freelist().begin(), c.freelist().end()), (std::vector<rc::SetId>{4, 3}));

  c.freelist_stream().pin(1);  // entry "3"
  ASSERT_TRUE(c.access(line(g, F, 1)).pointer_update_fired);
  EXPECT_EQ(c.entry(F).present, 3u);
  EXPECT_EQ(c.entry(F).past, 6u);
  EXPECT_EQ(std::vector<rc::SetId>(c.freelist().begin(), c.freelist().end()), (std::vector<rc::SetId>{4, 8}));

  for (rc::SetId a = 0; a < g.num_sets; ++a)
    if (a != B && a != F) EXPECT_EQ(c.entry(a), before[a]) << "addrset " << a;
}

TEST(RollingCache, FreelistPickAvoidsCurrentPointers) {
  const auto g = geom(16, 2, 3);
  auto s = identity_state(g, {3, 4, 12});
  s.entries[0] = {3, 4, 2};
  for (int i = 0; i < 200; ++i) {
    auto c = rc::RollingCache::from_snapshot(s, static_cast<std::uint64_t>(i));
    c.access(line(g, 0, 1));
    ASSERT_EQ(c.entry(0).present, 12u);
  }
}

TEST(RollingCache, FreelistPickFallsBackWhenEverythingIsMapped) {
  const auto g = geom(16, 2, 2);
  auto s = identity_state(g, {3, 4});
  s.entries[0] = {3, 4, 2};
  auto c = rc::RollingCache::from_snapshot(s, 1);
  c.access(line(g, 0, 1));
  EXPECT_EQ(c.stats().pointer_updates, 1u);
  EXPECT_EQ(c.freelist().size(), 2u);
}

TEST(RollingCache, FreelistLengthIsConserved) {
  const auto g = geom(64, 4, 16);
  rc::RollingCache c(g, 9);
  rc::Stream s(4);
  for (int i = 0; i < 20000; ++i) {
    const auto out = c.access(line(g, static_cast<rc::SetId>(s.uniform_below(64)), s.uniform_below(1 << 20)));
    if (out.pointer_update_fired) ASSERT_EQ(c.freelist().size(), 16u);
  }
  EXPECT_GT(c.stats().pointer_updates, 1000u);
}

TEST(RollingCache, DrainInvalidatesOnlyTheAddrSetsLines) {
  const auto g = geom(16, 5, 2);
  constexpr rc::SetId T = 2, Other = 4, Released = 9;
  auto s = identity_state(g, {12});
  s.handling.push_back({Released, T, 1, 10});
  s.lines = {{Released, 0, 100, T, false},
             {Released, 1, 101, T, true},
             {Released, 2, 102, T, false},
             {Released, 3, 200, Other, false},
             {Released, 4, 201, Other, false}};
  rc::RollingCacheOptions opt;
  opt.drain_mode = rc::DrainMode::delayed;
  auto c = rc::RollingCache::from_snapshot(s, 1, opt);

  const auto pending = c.lookup(line(g, T, 101));
  EXPECT_TRUE(pending.hit);
  EXPECT_EQ(pending.source, rc::AccessSource::handling_register);

  std::vector<std::uint64_t> written;
  c.set_writeback_sink([&](rc::Address, std::uint64_t p) { written.push_back(p); });
  const auto r = c.drain(s.handling[0]);
  EXPECT_EQ(r, (rc::DrainResult{3, 1}));
  EXPECT_EQ(written.size(), 1u);
  EXPECT_TRUE(c.handling_register().empty());
  EXPECT_EQ(c.freelist().back(), Released);
  for (std::uint64_t t : {100, 101, 102}) EXPECT_FALSE(c.contains(line(g, T, t)));
  EXPECT_EQ(std::count_if(c.set_lines(Released).begin(), c.set_lines(Released).end(),
                          [](const rc::CacheLine& l) { return l.valid; }),
            2);
}

TEST(RollingCache, DrainWithNothingToInvalidate) {
  const auto g = geom(16, 2, 2);
  auto s = identity_state(g, {12});
  s.handling.push_back({9, 2, 0, 10});
  rc::RollingCacheOptions opt;
  opt.drain_mode = rc::DrainMode::delayed;
  auto c = rc::RollingCache::from_snapshot(s, 1, opt);
  EXPECT_EQ(c.drain(s.handling[0]), (rc::DrainResult{0, 0}));
  EXPECT_EQ(c.freelist().back(), 9u);
  EXPECT_THROW(c.drain(s.handling[0]), rc::InternalError);
}

TEST(RollingCache, DelayedDrainLivesForTheConfiguredAccesses) {
  const auto g = geom(16, 2, 2);
  auto s = identity_state(g, {10, 11});
  s.entries[3] = {3, 5, 2};
  rc::RollingCacheOptions opt;
  opt.drain_mode = rc::DrainMode::delayed;
  opt.drain_delay = 2;
  auto c = rc::RollingCache::from_snapshot(s, 1, opt);
  c.access(line(g, 3, 1));
  ASSERT_EQ(c.handling_register().size(), 1u);
  EXPECT_EQ(c.freelist().size(), 1u);
  c.access(line(g, 7, 1));
  EXPECT_EQ(c.handling_register().size(), 1u);
  c.access(line(g, 7, 2));
  EXPECT_TRUE(c.handling_register().empty());
  EXPECT_EQ(c.freelist().size(), 2u);
}

TEST(RollingCache, PendingEntryDrainsBeforeTheSameAddrSetRollsAgain) {
  const auto g = geom(16, 2, 4);
  rc::RollingCacheOptions opt;
  opt.drain_mode = rc::DrainMode::delayed;
  opt.drain_delay = 1000;
  auto s = identity_state(g, {10, 11, 12, 13});
  s.entries[3] = {3, 5, 2};
  auto c = rc::RollingCache::from_snapshot(s, 1, opt);
  for (std::uint64_t t = 1; t <= 9; ++t) {
    c.access(line(g, 3, t));
    std::size_t mine = 0;
    for (const auto& h : c.handling_register()) mine += h.addrset == 3;
    ASSERT_LE(mine, 1u);
    ASSERT_EQ(c.freelist().size() + c.handling_register().size(), 4u);
  }
  EXPECT_EQ(c.stats().pointer_updates, 5u);
}

TEST(RollingCache, FlushOfUncachedLineChangesNothing) {
  const auto g = geom();
  rc::RollingCache c(g, 3);
  c.access(line(g, 1, 1));
  const auto before = c.snapshot();
  EXPECT_FALSE(c.flush_line(line(g, 1, 2)));
  EXPECT_EQ(c.snapshot(), before);
}

TEST(RollingCache, FlushInvalidatesButKeepsPointers) {
  const auto g = geom();
  rc::RollingCache c(g, 3);
  const auto x = line(g, 4, 8);
  c.access(x);
  const auto entry = c.entry(4);
  EXPECT_TRUE(c.flush_line(x));
  EXPECT_FALSE(c.contains(x));
  EXPECT_EQ(c.entry(4), entry);
}

TEST(RollingCache, FlushOfDirtyLineWritesBack) {
  const auto g = geom();
  rc::RollingCache c(g, 3);
  std::map<rc::Address, std::uint64_t> mem;
  c.set_writeback_sink([&](rc::Address a, std::uint64_t p) { mem[a] = p; });
  const auto x = line(g, 4, 8);
  c.access(x, rc::AccessKind::write, 55);
  c.flush_line(x);
  EXPECT_EQ(mem.at(x), 55u);
  EXPECT_EQ(c.stats().writebacks, 1u);
}

TEST(RollingCache, RandomFlushesNeverTouchCounters) {
  const auto g = geom(64, 4, 16);
  rc::RollingCache c(g, 12);
  rc::Stream s(8);
  std::vector<rc::Address> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto a = line(g, static_cast<rc::SetId>(s.uniform_below(64)), s.uniform_below(64));
    c.access(a);
    seen.push_back(a);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto entries = std::vector<rc::IndirectionEntry>(c.entries().begin(), c.entries().end());
    const auto fl = std::vector<rc::SetId>(c.freelist().begin(), c.freelist().end());
    c.flush_line(seen[s.uniform_below(seen.size())]);
    ASSERT_TRUE(std::equal(entries.begin(), entries.end(), c.entries().begin(), c.entries().end()));
    ASSERT_TRUE(std::equal(fl.begin(), fl.end(), c.freelist().begin(), c.freelist().end()));
  }
}

TEST(RollingCache, InitIsDeterministic) {
  const auto g = geom(256, 8, 64);
  EXPECT_TRUE(rc::RollingCache(g, 5).same_state(rc::RollingCache(g, 5)));
  EXPECT_FALSE(rc::RollingCache(g, 5).same_state(rc::RollingCache(g, 6)));
}

TEST(RollingCache, InitMappingIsAPermutation) {
  const auto g = geom(256, 8, 64);
  const rc::RollingCache c(g, 21);
  std::set<rc::SetId> present;
  for (const auto& e : c.entries()) {
    present.insert(e.present);
    EXPECT_EQ(e.past, e.present);
    EXPECT_LT(e.fill_count, g.ways);
  }
  EXPECT_EQ(present.size(), 256u);
  const std::set<rc::SetId> fl(c.freelist().begin(), c.freelist().end());
  EXPECT_EQ(fl.size(), 64u);
  for (rc::SetId s = 0; s < g.num_sets; ++s)
    for (const auto& l : c.set_lines(s)) EXPECT_FALSE(l.valid);
}

TEST(RollingCache, InitCountersCoverTheRange) {
  const auto g = geom(1024, 4, 64);
  const rc::RollingCache c(g, 2);
  std::vector<int> hist(4, 0);
  for (const auto& e : c.entries()) ++hist[e.fill_count];
  for (int h : hist) EXPECT_GT(h, 150);
}

TEST(RollingCache, DirtyEvictionReportsWriteback) {
  const auto g = geom(16, 2, 2);
  auto s = identity_state(g, {10, 11});
  s.entries[1] = {1, 1, 0};
  auto c = rc::RollingCache::from_snapshot(s, 1);
  std::map<rc::Address, std::uint64_t> mem;
  c.set_writeback_sink([&](rc::Address a, std::uint64_t p) { mem[a] = p; });
  // Two dirty lines then two rolls: the first window is invalidated with writebacks.
  c.access(line(g, 1, 1), rc::AccessKind::write, 11);
  c.access(line(g, 1, 2), rc::AccessKind::write, 22);
  for (std::uint64_t t = 3; t <= 5; ++t) c.access(line(g, 1, t));
  EXPECT_EQ(mem.at(line(g, 1, 1)), 11u);
  EXPECT_EQ(mem.at(line(g, 1, 2)), 22u);
}

TEST(RollingCache, StatsBalance) {
  const auto g = geom(64, 4, 16);
  rc::RollingCache c(g, 1);
  rc::Stream s(2);
  for (int i = 0; i < 5000; ++i) c.access(line(g, static_cast<rc::SetId>(s.uniform_below(64)), s.uniform_below(32)));
  EXPECT_EQ(c.stats().hits + c.stats().misses, c.stats().accesses);
  EXPECT_EQ(c.stats().accesses, 5000u);
}

TEST(RollingCache, PinningReplacementLeavesFreelistPicksAlone) {
  const auto g = geom(64, 2, 16);
  rc::RollingCache a(g, 33), b(g, 33);
  b.replacement_stream().pin({1, 0, 1, 1, 0, 0, 1});
  rc::Stream s(5);
  for (int i = 0; i < 400; ++i) {
    const auto addr = line(g, static_cast<rc::SetId>(s.uniform_below(4)), s.uniform_below(1 << 16));
    const bool ua = a.access(addr).pointer_update_fired;
    const bool ub = b.access(addr).pointer_update_fired;
    ASSERT_EQ(ua, ub);
    if (ua) ASSERT_EQ(a.last_update()->new_present, b.last_update()->new_present);
  }
}

TEST(RollingCache, OccupiedPairMovesAfterTwoUpdates) {
  const auto g = geom(16, 2, 2);
  auto s = identity_state(g, {12, 13});
  s.entries[4] = {4, 4, 0};
  auto c = rc::RollingCache::from_snapshot(s, 1);
  c.freelist_stream().pin({0, 0});
  const std::set<rc::SetId> original{4};
  std::set<rc::SetId> occupied;
  for (std::uint64_t t = 1; t <= 5; ++t) {
    c.access(line(g, 4, t));
    occupied = {c.entry(4).present, c.entry(4).past};
  }
  EXPECT_EQ(c.stats().pointer_updates, 2u);
  EXPECT_EQ(occupied, (std::set<rc::SetId>{12, 13}));
  EXPECT_NE(occupied, original);
}

TEST(RollingCache, SaturatedStateIsFullAndConsistent) {
  rc::CacheGeometry g = geom(64, 2, 64);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = rc::RollingCache::saturated(g, seed, rc::SetId{7});
    EXPECT_TRUE(rctest::check_invariants(c).empty());
    for (rc::SetId set = 0; set < g.num_sets; ++set)
      for (const auto& l : c.set_lines(set)) ASSERT_TRUE(l.valid);
    EXPECT_EQ(c.entry(7).present, c.entry(7).past);
    for (const auto& l : c.set_lines(c.entry(7).present)) {
      bool shared = false;
      for (rc::SetId a = 0; a < g.num_sets; ++a)
        shared |= a != 7 && (c.entry(a).present == c.entry(7).present || c.entry(a).past == c.entry(7).present);
      if (shared) EXPECT_NE(l.addrset, 7u);
    }
  }
}

TEST(RollingCache, SaturatedRejectsBadReservation) {
  EXPECT_THROW(rc::RollingCache::saturated(geom(16, 2, 2), 1, rc::SetId{16}), rc::ConfigError);
}
