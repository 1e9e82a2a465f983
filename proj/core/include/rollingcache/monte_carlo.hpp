#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rollingcache/analytics.hpp"
#include "rollingcache/geometry.hpp"
#include "rollingcache/rolling_cache.hpp"

namespace rollingcache {

struct Proportion {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  [[nodiscard]] double value() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
  /// sqrt(p(1-p)/n) at the estimate; 0 for degenerate estimates.
  [[nodiscard]] double std_error() const;
};

enum class StartState : std::uint8_t {
  /// Every line valid and reachable (RollingCache::saturated).
  saturated,
  /// Default initial state followed by uniform background accesses.
  warmed,
};

std::string_view to_string(StartState s);
StartState parse_start_state(std::string_view name);

/// Bit set selecting which victim branches a trial runs.
enum class Quantity : std::uint8_t {
  retention = 1,
  miss_given_target = 2,
  miss_given_other = 4,
  /// Victim uniform over all AddrSets; also yields the posteriors.
  miss_due_to_victim = 8,
  all = 15,
};

constexpr Quantity operator|(Quantity a, Quantity b) {
  return static_cast<Quantity>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr bool has(Quantity set, Quantity q) {
  return (static_cast<std::uint8_t>(set) & static_cast<std::uint8_t>(q)) != 0;
}

struct MonteCarloConfig {
  CacheGeometry geom;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  StartState start = StartState::saturated;
  /// Warmed start only; empty means 10 * S * W.
  std::optional<std::uint64_t> warmup;
  /// Attacker prime length; 0 means 2W.
  std::uint32_t prime_len = 0;
  Quantity quantities = Quantity::all;
  RollingCacheOptions options;
};

/// Counts over positions x = 1..prime_len, stored at index x - 1. "Miss due
/// to the victim" means present after the prime and absent after the victim.
struct MonteCarloEstimate {
  std::uint64_t trials = 0;
  std::uint32_t positions = 0;
  Proportion prime_at_rollover;
  std::vector<Proportion> retention;
  std::vector<Proportion> miss_given_target;
  std::vector<Proportion> miss_given_other;
  std::vector<Proportion> miss_due_to_victim;
  /// Conditioned on the probed line being absent after a uniform victim.
  std::vector<Proportion> posterior_target;
  std::vector<Proportion> posterior_other;
};

/// Runs the prime / victim / probe trial loop on real RollingCache instances.
/// Each trial starts from its own seed; deterministic under `cfg.seed`.
MonteCarloEstimate monte_carlo(const MonteCarloConfig& cfg);

enum class Verdict : std::uint8_t { ok, insufficient, mismatch };
std::string_view to_string(Verdict v);

struct ComparisonRow {
  std::string quantity;
  std::uint32_t x = 0;
  double analytic = 0.0;
  double empirical = 0.0;
  std::uint64_t n = 0;
  /// Binomial standard error under the analytic value.
  double std_error = 0.0;
  double z_score = 0.0;
  Verdict verdict = Verdict::ok;
};

/// Rows for every closed-form entry with a Monte-Carlo counterpart.
/// A row is insufficient when n < max(100, 10 / min(a, 1 - a)) and a mismatch
/// when |z| > `z_limit`.
std::vector<ComparisonRow> compare(const ProbTable& table, const MonteCarloEstimate& est, double z_limit = 3.0);

[[nodiscard]] bool all_ok(const std::vector<ComparisonRow>& rows);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
/// One verdict line per quantity plus an overall line.
void write_comparison_verdicts(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace rollingcache
