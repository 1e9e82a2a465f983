#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rollingcache/cache_model.hpp"

namespace rollingcache {

// Disjoint tag regions keep attacker, victim and background lines apart:
// background tags below 2^(t-1), attacker tags from 2^(t-1), victim tags
// from 2^(t-1) + 2^(t-2), where t is the geometry's tag width.
Address attacker_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k);
Address victim_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k);
Address background_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k);

/// `count` uniform-random background accesses drawn from `rng`.
void warm_up(CacheModel& cache, std::uint64_t count, Stream& rng);

/// Every set filled with valid background lines: RollingCache::saturated for
/// the rolling model (keeping `reserved` unshared where possible), W
/// background lines per set for the baselines.
CacheFactory saturated_factory(ModelKind kind, const CacheGeometry& geom, std::optional<SetId> reserved,
                               RollingCacheOptions options = {});

enum class VictimPolicy : std::uint8_t {
  access_target,
  access_other_uniform,
  idle,
  /// Target with probability 1/S, otherwise one of the other S-1 AddrSets.
  uniform_all,
  target_or_idle,
  target_or_other,
};

std::string_view to_string(VictimPolicy policy);
VictimPolicy parse_victim_policy(std::string_view name);

/// Prior probability that the victim touches the target under `policy`.
double target_prior(VictimPolicy policy, std::uint32_t sets);

struct AttackConfig {
  SetId target_addrset = 0;
  /// Attacker accesses in the prime (evict+time: eviction accesses); 0 means W.
  std::uint32_t prime_len = 0;
  /// 1-based prime access probed by prime+probe.
  std::uint32_t probe_position = 1;
  VictimPolicy victim = VictimPolicy::uniform_all;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  /// Background accesses before each trial; empty means 10 * S * W.
  std::optional<std::uint64_t> warmup;
  /// Victim accesses per victim step (distinct lines of the chosen AddrSet).
  std::uint32_t victim_accesses = 1;
  /// LRU attack: setup attempts allowed per requested trial.
  std::uint32_t max_attempts_per_trial = 50;
  double alpha = 0.01;
  /// Keep every TrialOutcome in the report.
  bool keep_outcomes = false;
};

struct TrialOutcome {
  /// Side-channel observation: probe miss, or victim slowdown for evict+time.
  bool probe_miss = false;
  /// AddrSet the victim actually touched; empty when idle.
  std::optional<SetId> victim_action;
  /// Simulator ground truth (rolling model only).
  bool prime_start_at_rollover = false;
};

struct PositionStats {
  std::uint32_t position = 0;
  std::uint64_t n_target = 0, miss_target = 0;
  std::uint64_t n_other = 0, miss_other = 0;
  std::uint64_t n_idle = 0, miss_idle = 0;

  [[nodiscard]] std::uint64_t trials() const { return n_target + n_other + n_idle; }
  [[nodiscard]] std::uint64_t misses() const { return miss_target + miss_other + miss_idle; }
  [[nodiscard]] double p_miss_given_target() const;
  [[nodiscard]] double p_miss_given_other() const;
  [[nodiscard]] double p_miss_given_idle() const;
  /// Empty when no miss was observed.
  [[nodiscard]] std::optional<double> posterior_target() const;
  /// Correct decisions of the best of the four rules mapping {hit, miss} to
  /// {target, not target}.
  [[nodiscard]] std::uint64_t best_rule_correct() const;
  [[nodiscard]] std::string best_rule() const;
  [[nodiscard]] double accuracy() const;
};

struct LeakageReport {
  std::string attack;
  std::string model;
  AttackConfig config;
  std::uint64_t trials = 0;
  std::uint64_t precondition_failures = 0;
  std::uint64_t prime_at_rollover = 0;
  /// One entry per probed position; evict+time and the LRU attack have one.
  std::vector<PositionStats> positions;
  std::uint32_t decision_position = 1;
  double chance = 0.0;
  double p_value = 1.0;
  std::vector<TrialOutcome> outcomes;

  [[nodiscard]] const PositionStats& decision() const;
  [[nodiscard]] double accuracy() const { return decision().accuracy(); }
  /// Two-sided binomial test against `chance` rejected at alpha, with the
  /// accuracy on the high side.
  [[nodiscard]] bool significantly_above_chance() const { return p_value < config.alpha && accuracy() > chance; }
};

/// Throws ConfigError for an out-of-range target or probe position.
LeakageReport run_prime_probe(const CacheFactory& factory, const AttackConfig& cfg);
LeakageReport run_evict_time(const CacheFactory& factory, const AttackConfig& cfg);
LeakageReport run_lru_attack(const CacheFactory& factory, const AttackConfig& cfg);

enum class AttackKind : std::uint8_t { prime_probe, evict_time, lru };
std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(std::string_view name);
LeakageReport run_attack(AttackKind kind, const CacheFactory& factory, const AttackConfig& cfg);

void write_leakage_csv(std::ostream& out, const LeakageReport& report);
void write_leakage_summary(std::ostream& out, const LeakageReport& report);

}  // namespace rollingcache
