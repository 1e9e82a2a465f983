#include "rollingcache/rng.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace rollingcache {

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& word : s_) word = sm.next();
}

Xoshiro256StarStar::result_type Xoshiro256StarStar::operator()() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

std::string_view to_string(StreamLabel label) {
  switch (label) {
    case StreamLabel::init_mapping: return "init_mapping";
    case StreamLabel::init_counters: return "init_counters";
    case StreamLabel::init_freelist: return "init_freelist";
    case StreamLabel::replacement: return "replacement";
    case StreamLabel::freelist_pick: return "freelist_pick";
    case StreamLabel::victim_policy: return "victim_policy";
    case StreamLabel::warmup: return "warmup";
    case StreamLabel::trace_gen: return "trace_gen";
  }
  return "unknown";
}

std::uint64_t Stream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be >= 1");
  if (!script_.empty()) {
    const std::uint64_t v = script_.front();
    script_.pop_front();
    if (v >= n) {
      throw std::out_of_range("pinned stream value " + std::to_string(v) +
                              " out of range [0, " + std::to_string(n) + ")");
    }
    return v;
  }
  __extension__ using u128 = unsigned __int128;
  // Lemire's multiply-shift with rejection of the biased low region.
  u128 m = static_cast<u128>(gen_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(gen_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index) {
  SplitMix64 a(master_seed ^ 0xA0761D6478BD642FULL);
  SplitMix64 b(a.next() + index * 0xE7037ED1A0B428DBULL);
  return b.next();
}

Stream derive(std::uint64_t master_seed, StreamLabel label) {
  const auto tag = static_cast<std::uint64_t>(label) + 1;
  SplitMix64 mix(master_seed);
  const std::uint64_t base = mix.next();
  SplitMix64 lab(base ^ (tag * 0xD6E8FEB86659FD93ULL));
  return Stream(lab.next());
}

}  // namespace rollingcache
