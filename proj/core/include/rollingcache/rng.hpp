#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <string_view>

namespace rollingcache {

/// Name of the generator recorded in every CSV header comment.
inline constexpr std::string_view kRngAlgorithm = "xoshiro256** (splitmix64-seeded)";

/// splitmix64 (Steele, Lea & Flood; Vigna's fixed-increment variant). Used
/// only to expand seeds into generator state.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna).
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  bool operator==(const Xoshiro256StarStar&) const = default;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// One independent consumer of randomness. Each concern in the simulator owns
/// its own stream so that pinning one does not shift the draws of another.
enum class StreamLabel : std::uint8_t {
  init_mapping,
  init_counters,
  init_freelist,
  replacement,
  freelist_pick,
  victim_policy,
  warmup,
  trace_gen,
};

std::string_view to_string(StreamLabel label);

/// A seeded random stream that can optionally be pinned to a scripted sequence
/// of bounded draws. While the script is non-empty, `uniform_below` returns the
/// scripted values (which must be in range) without advancing the generator.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  /// Unbiased integer in [0, n). Throws std::invalid_argument when n == 0.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Raw 64-bit output (ignores any script).
  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  void pin(std::initializer_list<std::uint64_t> values) { script_.insert(script_.end(), values); }
  void pin(std::uint64_t value) { script_.push_back(value); }
  [[nodiscard]] bool pinned() const { return !script_.empty(); }

  bool operator==(const Stream&) const = default;

 private:
  Xoshiro256StarStar gen_;
  std::deque<std::uint64_t> script_;
};

/// Stream for (master_seed, label). Distinct labels and distinct seeds give
/// independent, individually reproducible streams.
Stream derive(std::uint64_t master_seed, StreamLabel label);

/// Seed of the i-th child of `master_seed` (used to give each trial or run its
/// own master seed).
std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace rollingcache
