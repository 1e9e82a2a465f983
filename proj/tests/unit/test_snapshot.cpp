#include <gtest/gtest.h>

#include <sstream>

#include "rollingcache/errors.hpp"
#include "rollingcache/rolling_cache.hpp"
#include "rollingcache/snapshot.hpp"

namespace rc = rollingcache;

namespace {

rc::RollingCache busy_cache(rc::RollingCacheOptions opt = {}) {
  rc::CacheGeometry g;
  g.num_sets = 32;
  g.ways = 4;
  g.freelist_len = 8;
  rc::RollingCache c(g, 3, opt);
  rc::Stream s(3);
  for (int i = 0; i < 3000; ++i)
    c.access(g.line_address(s.uniform_below(40), static_cast<rc::SetId>(s.uniform_below(32))),
             i % 5 == 0 ? rc::AccessKind::write : rc::AccessKind::read);
  return c;
}

}  // namespace

TEST(Snapshot, TextRoundTrip) {
  const auto snap = busy_cache().snapshot();
  std::stringstream ss;
  rc::write_snapshot(ss, snap);
  EXPECT_EQ(rc::read_snapshot(ss), snap);
}

TEST(Snapshot, RoundTripWithLiveHandlingEntries) {
  rc::RollingCacheOptions opt;
  opt.drain_mode = rc::DrainMode::delayed;
  opt.drain_delay = 50;
  const auto snap = busy_cache(opt).snapshot();
  ASSERT_FALSE(snap.handling.empty());
  std::stringstream ss;
  rc::write_snapshot(ss, snap);
  EXPECT_EQ(rc::read_snapshot(ss), snap);
}

TEST(Snapshot, RestoredCacheHasTheSameState) {
  const auto c = busy_cache();
  const auto restored = rc::RollingCache::from_snapshot(c.snapshot(), 99);
  EXPECT_TRUE(restored.same_state(c));
}

TEST(Snapshot, HeaderIsVersioned) {
  std::stringstream ss;
  rc::write_snapshot(ss, busy_cache().snapshot());
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, "rollingcache-snapshot 1");
}

TEST(Snapshot, ParseErrorsCarryLineNumbers) {
  std::stringstream bad("rollingcache-snapshot 1\ngeometry 16 2 64 2 48\nentries x\n");
  try {
    rc::read_snapshot(bad);
    FAIL();
  } catch (const rc::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream wrong_version("rollingcache-snapshot 9\n");
  EXPECT_THROW(rc::read_snapshot(wrong_version), rc::ParseError);
}
