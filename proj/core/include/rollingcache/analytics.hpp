#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace rollingcache {

/// Scenario probabilities of a 2W-access prime: A = prime starts at a pointer
/// rollover, B = it does not, C_n = the n-th access escapes random eviction.
struct ScenarioProbs {
  double p_a = 0.0;
  double p_b = 0.0;
  /// p_c[n - 1] for n = 1..W.
  std::vector<double> p_c;
};

/// Throws ConfigError when W == 0.
ScenarioProbs scenario_probs(std::uint32_t ways);

/// Probe positions 1..4 of the four-access prime, stored at index x - 1.
using ProbeVector = std::array<double, 4>;

/// P(prime access x still cached after the prime). Requires W >= 2.
ProbeVector prime_retention(std::uint32_t ways);

/// P(probe of x misses because the victim touched the primed AddrSet).
ProbeVector probe_miss_given_target(std::uint32_t ways);

/// P(probe of x misses because the victim touched one other AddrSet):
/// retention[x] / (S W). Requires W >= 2 and S >= 2.
ProbeVector probe_miss_given_other(std::uint32_t ways, std::uint32_t sets);

/// Victim AddrSet uniform over all S: (1/S) target + ((S-1)/S) other.
ProbeVector miss_due_to_victim(std::uint32_t ways, std::uint32_t sets);

struct Posterior {
  /// Empty where the denominator m_prime + miss_due_to_victim is zero.
  std::array<std::optional<double>, 4> target;
  std::array<std::optional<double>, 4> other;
};

/// P(victim touched the primed AddrSet | miss on x) and the same for any
/// other AddrSet, with denominator m_prime[x] + miss_due_to_victim[x].
Posterior posterior(std::uint32_t ways, std::uint32_t sets);

struct ProbTable {
  std::uint32_t ways = 0;
  std::uint32_t sets = 0;
  ScenarioProbs scenario;
  ProbeVector retention{};
  ProbeVector m_prime{};
  ProbeVector miss_given_target{};
  ProbeVector undetected{};
  ProbeVector miss_given_other{};
  ProbeVector miss_due_to_victim{};
  std::array<std::optional<double>, 4> posterior_target;
  std::array<std::optional<double>, 4> posterior_other;
};

ProbTable make_prob_table(std::uint32_t ways, std::uint32_t sets);

}  // namespace rollingcache
