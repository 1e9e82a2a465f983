#include "rollingcache/analytics.hpp"

#include <cmath>

#include "rollingcache/errors.hpp"

namespace rollingcache {

namespace {

void require_ways(std::uint32_t ways) {
  if (ways < 2) throw ConfigError("ways: the four-access prime formulas need W >= 2");
}

void require_sets(std::uint32_t sets) {
  if (sets < 2) throw ConfigError("sets: need S >= 2");
}

}  // namespace

ScenarioProbs scenario_probs(std::uint32_t ways) {
  if (ways == 0) throw ConfigError("ways: must be >= 1");
  const double w = ways;
  ScenarioProbs p;
  p.p_a = 1.0 / w;
  p.p_b = (w - 1.0) / w;
  p.p_c.resize(ways);
  for (std::uint32_t n = 1; n <= ways; ++n) p.p_c[n - 1] = std::pow((w - 1.0) / w, static_cast<double>(ways - n));
  return p;
}

ProbeVector prime_retention(std::uint32_t ways) {
  require_ways(ways);
  const ScenarioProbs p = scenario_probs(ways);
  const double c1 = p.p_c[0];
  return {p.p_a * c1, p.p_a + p.p_b * c1, p.p_a * c1 + p.p_b, 1.0};
}

ProbeVector probe_miss_given_target(std::uint32_t ways) {
  require_ways(ways);
  const ScenarioProbs p = scenario_probs(ways);
  return {p.p_a * p.p_c[0], p.p_a, 0.0, p.p_b * (1.0 / ways)};
}

ProbeVector probe_miss_given_other(std::uint32_t ways, std::uint32_t sets) {
  require_ways(ways);
  require_sets(sets);
  const ProbeVector r = prime_retention(ways);
  const double k = 1.0 / (static_cast<double>(sets) * ways);
  return {r[0] * k, r[1] * k, r[2] * k, r[3] * k};
}

ProbeVector miss_due_to_victim(std::uint32_t ways, std::uint32_t sets) {
  const ProbeVector t = probe_miss_given_target(ways);
  const ProbeVector o = probe_miss_given_other(ways, sets);
  const double s = sets;
  ProbeVector out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t[i] / s + (s - 1.0) / s * o[i];
  return out;
}

Posterior posterior(std::uint32_t ways, std::uint32_t sets) {
  const ProbeVector r = prime_retention(ways);
  const ProbeVector t = probe_miss_given_target(ways);
  const ProbeVector o = probe_miss_given_other(ways, sets);
  const ProbeVector m = miss_due_to_victim(ways, sets);
  const double s = sets;
  Posterior out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double denom = (1.0 - r[i]) + m[i];
    if (denom == 0.0) continue;
    out.target[i] = t[i] * (1.0 / s) / denom;
    out.other[i] = (s - 1.0) / s * o[i] / denom;
  }
  return out;
}

ProbTable make_prob_table(std::uint32_t ways, std::uint32_t sets) {
  ProbTable t;
  t.ways = ways;
  t.sets = sets;
  t.scenario = scenario_probs(ways);
  t.retention = prime_retention(ways);
  t.miss_given_target = probe_miss_given_target(ways);
  t.miss_given_other = probe_miss_given_other(ways, sets);
  t.miss_due_to_victim = miss_due_to_victim(ways, sets);
  for (std::size_t i = 0; i < 4; ++i) {
    t.m_prime[i] = 1.0 - t.retention[i];
    t.undetected[i] = 1.0 - t.miss_given_target[i];
  }
  const Posterior p = posterior(ways, sets);
  t.posterior_target = p.target;
  t.posterior_other = p.other;
  return t;
}

}  // namespace rollingcache
