#include "rollingcache/attack.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <ostream>

#include "rollingcache/errors.hpp"
#include "rollingcache/stats.hpp"

namespace rollingcache {

namespace {

std::uint64_t tag_base(const CacheGeometry& geom, unsigned shift) {
  const std::uint32_t t = geom.tag_bits();
  if (t < 3) throw ConfigError("addr-bits: attacks need at least 3 tag bits");
  return std::uint64_t{1} << (t - shift);
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::uint64_t warmup_count(const AttackConfig& cfg, const CacheGeometry& geom) {
  return cfg.warmup.value_or(10 * geom.lines());
}

void check_config(const AttackConfig& cfg, const CacheGeometry& geom) {
  if (cfg.target_addrset >= geom.num_sets)
    throw ConfigError("target: AddrSet " + std::to_string(cfg.target_addrset) + " out of range (sets=" +
                      std::to_string(geom.num_sets) + ")");
  if (cfg.trials == 0) throw ConfigError("trials: must be >= 1");
  if (cfg.victim_accesses == 0) throw ConfigError("victim-accesses: must be >= 1");
  if ((cfg.victim == VictimPolicy::access_other_uniform || cfg.victim == VictimPolicy::target_or_other ||
       cfg.victim == VictimPolicy::uniform_all) &&
      geom.num_sets < 2)
    throw ConfigError("victim: this policy needs at least two AddrSets");
}

std::uint32_t prime_length(const AttackConfig& cfg, const CacheGeometry& geom) {
  return cfg.prime_len == 0 ? geom.ways : cfg.prime_len;
}

SetId other_addrset(Stream& rng, SetId target, std::uint32_t sets) {
  auto k = static_cast<SetId>(rng.uniform_below(sets - 1));
  return k >= target ? k + 1 : k;
}

std::optional<SetId> draw_victim(VictimPolicy policy, Stream& rng, SetId target, std::uint32_t sets) {
  switch (policy) {
    case VictimPolicy::access_target: return target;
    case VictimPolicy::access_other_uniform: return other_addrset(rng, target, sets);
    case VictimPolicy::idle: return std::nullopt;
    case VictimPolicy::uniform_all: return static_cast<SetId>(rng.uniform_below(sets));
    case VictimPolicy::target_or_idle:
      if (rng.uniform_below(2) == 0) return target;
      return std::nullopt;
    case VictimPolicy::target_or_other:
      if (rng.uniform_below(2) == 0) return target;
      return other_addrset(rng, target, sets);
  }
  return std::nullopt;
}

bool at_rollover(const CacheModel& cache, SetId addrset) {
  const RollingCache* rc = cache.rolling();
  if (rc == nullptr) return false;
  const std::uint32_t fc = rc->entry(addrset).fill_count;
  return fc == 0 || fc == rc->geometry().ways;
}

void record(PositionStats& p, const std::optional<SetId>& action, SetId target, bool miss) {
  if (!action) {
    ++p.n_idle;
    p.miss_idle += miss;
  } else if (*action == target) {
    ++p.n_target;
    p.miss_target += miss;
  } else {
    ++p.n_other;
    p.miss_other += miss;
  }
}

LeakageReport start_report(std::string_view attack, const CacheFactory& factory, const AttackConfig& cfg,
                           CacheGeometry& geom) {
  const CacheModel probe = factory(cfg.seed);
  geom = probe.geometry();
  check_config(cfg, geom);
  LeakageReport r;
  r.attack = std::string(attack);
  r.model = std::string(to_string(probe.kind()));
  r.config = cfg;
  const double prior = target_prior(cfg.victim, geom.num_sets);
  r.chance = std::max(prior, 1.0 - prior);
  return r;
}

void finish_report(LeakageReport& r) {
  const PositionStats& d = r.decision();
  r.p_value = binomial_two_sided_p(d.best_rule_correct(), d.trials(), r.chance);
}

}  // namespace

Address attacker_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k) {
  return geom.line_address(tag_base(geom, 1) + k, addrset);
}

Address victim_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k) {
  return geom.line_address(tag_base(geom, 1) + tag_base(geom, 2) + k, addrset);
}

Address background_line(const CacheGeometry& geom, SetId addrset, std::uint64_t k) {
  return geom.line_address(k % tag_base(geom, 1), addrset);
}

void warm_up(CacheModel& cache, std::uint64_t count, Stream& rng) {
  const CacheGeometry& g = cache.geometry();
  const std::uint64_t tags = tag_base(g, 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto s = static_cast<SetId>(rng.uniform_below(g.num_sets));
    cache.access(background_line(g, s, rng.uniform_below(tags)));
  }
}

CacheFactory saturated_factory(ModelKind kind, const CacheGeometry& geom, std::optional<SetId> reserved,
                               RollingCacheOptions options) {
  geom.validate();
  if (kind == ModelKind::rolling) {
    return [geom, reserved, options](std::uint64_t seed) {
      return CacheModel(RollingCache::saturated(geom, seed, reserved, options));
    };
  }
  return [kind, geom, options](std::uint64_t seed) {
    CacheModel c = make_cache(kind, geom, seed, options);
    for (SetId s = 0; s < geom.num_sets; ++s)
      for (std::uint64_t k = 0; k < geom.ways; ++k) c.access(background_line(geom, s, k + 1));
    return c;
  };
}

std::string_view to_string(VictimPolicy policy) {
  switch (policy) {
    case VictimPolicy::access_target: return "access_target";
    case VictimPolicy::access_other_uniform: return "access_other_uniform";
    case VictimPolicy::idle: return "idle";
    case VictimPolicy::uniform_all: return "uniform_all";
    case VictimPolicy::target_or_idle: return "target_or_idle";
    case VictimPolicy::target_or_other: return "target_or_other";
  }
  return "unknown";
}

VictimPolicy parse_victim_policy(std::string_view name) {
  for (auto p : {VictimPolicy::access_target, VictimPolicy::access_other_uniform, VictimPolicy::idle,
                 VictimPolicy::uniform_all, VictimPolicy::target_or_idle, VictimPolicy::target_or_other}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown victim policy '" + std::string(name) + "'");
}

double target_prior(VictimPolicy policy, std::uint32_t sets) {
  switch (policy) {
    case VictimPolicy::access_target: return 1.0;
    case VictimPolicy::access_other_uniform:
    case VictimPolicy::idle: return 0.0;
    case VictimPolicy::uniform_all: return 1.0 / sets;
    case VictimPolicy::target_or_idle:
    case VictimPolicy::target_or_other: return 0.5;
  }
  return 0.0;
}

double PositionStats::p_miss_given_target() const { return ratio(miss_target, n_target); }
double PositionStats::p_miss_given_other() const { return ratio(miss_other, n_other); }
double PositionStats::p_miss_given_idle() const { return ratio(miss_idle, n_idle); }

std::optional<double> PositionStats::posterior_target() const {
  if (misses() == 0) return std::nullopt;
  return ratio(miss_target, misses());
}

namespace {

// Order breaks ties: the signal-following rule first.
std::array<std::uint64_t, 4> rule_scores(const PositionStats& p) {
  const std::uint64_t hits_nontarget = (p.n_other - p.miss_other) + (p.n_idle - p.miss_idle);
  return {p.miss_target + hits_nontarget, p.n_other + p.n_idle, p.n_target,
          (p.n_target - p.miss_target) + p.miss_other + p.miss_idle};
}

constexpr std::array<std::string_view, 4> kRuleNames = {"miss=>target", "never_target", "always_target",
                                                        "hit=>target"};

}  // namespace

std::uint64_t PositionStats::best_rule_correct() const {
  const auto s = rule_scores(*this);
  return *std::max_element(s.begin(), s.end());
}

std::string PositionStats::best_rule() const {
  const auto s = rule_scores(*this);
  return std::string(kRuleNames[static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin())]);
}

double PositionStats::accuracy() const { return ratio(best_rule_correct(), trials()); }

const PositionStats& LeakageReport::decision() const {
  for (const auto& p : positions)
    if (p.position == decision_position) return p;
  throw InternalError("leakage report has no decision position");
}

LeakageReport run_prime_probe(const CacheFactory& factory, const AttackConfig& cfg) {
  CacheGeometry geom;
  LeakageReport r = start_report("prime_probe", factory, cfg, geom);
  const std::uint32_t len = prime_length(cfg, geom);
  if (cfg.probe_position < 1 || cfg.probe_position > len)
    throw ConfigError("probe-position: must be in [1, " + std::to_string(len) + "]");
  const SetId x = cfg.target_addrset;
  const std::uint64_t warm = warmup_count(cfg, geom);

  r.positions.resize(len);
  for (std::uint32_t i = 0; i < len; ++i) r.positions[i].position = i + 1;
  r.decision_position = cfg.probe_position;

  std::vector<bool> missing(len);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t ts = child_seed(cfg.seed, t);
    CacheModel c = factory(ts);
    Stream wu = derive(ts, StreamLabel::warmup);
    Stream vs = derive(ts, StreamLabel::victim_policy);
    warm_up(c, warm, wu);

    TrialOutcome o;
    o.prime_start_at_rollover = at_rollover(c, x);
    for (std::uint32_t k = 0; k < len; ++k) c.access(attacker_line(geom, x, k));
    o.victim_action = draw_victim(cfg.victim, vs, x, geom.num_sets);
    if (o.victim_action)
      for (std::uint32_t j = 0; j < cfg.victim_accesses; ++j) c.access(victim_line(geom, *o.victim_action, j));

    // What a probe of each prime access would observe, then the real probe.
    for (std::uint32_t k = 0; k < len; ++k) missing[k] = !c.contains(attacker_line(geom, x, k));
    o.probe_miss = !c.access(attacker_line(geom, x, cfg.probe_position - 1)).hit;
    if (o.probe_miss != missing[cfg.probe_position - 1]) throw InternalError("probe disagrees with lookup");

    for (std::uint32_t k = 0; k < len; ++k) record(r.positions[k], o.victim_action, x, missing[k]);
    r.prime_at_rollover += o.prime_start_at_rollover;
    ++r.trials;
    if (cfg.keep_outcomes) r.outcomes.push_back(o);
  }
  finish_report(r);
  return r;
}

LeakageReport run_evict_time(const CacheFactory& factory, const AttackConfig& cfg) {
  CacheGeometry geom;
  LeakageReport r = start_report("evict_time", factory, cfg, geom);
  const std::uint32_t len = prime_length(cfg, geom);
  const SetId x = cfg.target_addrset;
  const std::uint64_t warm = warmup_count(cfg, geom);
  r.positions.resize(1);
  r.positions[0].position = 1;
  r.decision_position = 1;

  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t ts = child_seed(cfg.seed, t);
    CacheModel c = factory(ts);
    Stream wu = derive(ts, StreamLabel::warmup);
    Stream vs = derive(ts, StreamLabel::victim_policy);
    warm_up(c, warm, wu);

    TrialOutcome o;
    o.victim_action = draw_victim(cfg.victim, vs, x, geom.num_sets);
    auto run_victim = [&](CacheModel& m) {
      std::uint64_t misses = 0;
      if (o.victim_action)
        for (std::uint32_t j = 0; j < cfg.victim_accesses; ++j)
          misses += !m.access(victim_line(geom, *o.victim_action, j)).hit;
      return misses;
    };
    run_victim(c);
    o.prime_start_at_rollover = at_rollover(c, x);

    CacheModel evicted = c;
    for (std::uint32_t k = 0; k < len; ++k) evicted.access(attacker_line(geom, x, k));
    const std::uint64_t base = run_victim(c);
    const std::uint64_t slow = run_victim(evicted);
    o.probe_miss = slow > base;

    record(r.positions[0], o.victim_action, x, o.probe_miss);
    r.prime_at_rollover += o.prime_start_at_rollover;
    ++r.trials;
    if (cfg.keep_outcomes) r.outcomes.push_back(o);
  }
  finish_report(r);
  return r;
}

LeakageReport run_lru_attack(const CacheFactory& factory, const AttackConfig& cfg) {
  CacheGeometry geom;
  LeakageReport r = start_report("lru", factory, cfg, geom);
  if (geom.ways < 2) throw ConfigError("ways: the LRU attack needs W >= 2");
  const SetId x = cfg.target_addrset;
  const std::uint64_t warm = warmup_count(cfg, geom);
  const std::uint32_t w = geom.ways;
  r.positions.resize(1);
  r.positions[0].position = 1;
  r.decision_position = 1;

  const std::uint64_t max_attempts = cfg.trials * std::max<std::uint32_t>(1, cfg.max_attempts_per_trial);
  for (std::uint64_t attempt = 0; r.trials < cfg.trials && attempt < max_attempts; ++attempt) {
    const std::uint64_t ts = child_seed(cfg.seed, attempt);
    CacheModel c = factory(ts);
    Stream wu = derive(ts, StreamLabel::warmup);
    Stream vs = derive(ts, StreamLabel::victim_policy);
    warm_up(c, warm, wu);

    const Address v = victim_line(geom, x, 0);
    c.access(v);
    const bool rollover = at_rollover(c, x);
    for (std::uint32_t k = 0; k + 1 < w; ++k) c.access(attacker_line(geom, x, k));
    if (!c.contains(v)) {
      ++r.precondition_failures;
      continue;
    }

    TrialOutcome o;
    o.prime_start_at_rollover = rollover;
    o.victim_action = draw_victim(cfg.victim, vs, x, geom.num_sets);
    if (o.victim_action) c.access(*o.victim_action == x ? v : victim_line(geom, *o.victim_action, 0));
    c.access(attacker_line(geom, x, w - 1));
    o.probe_miss = !c.access(attacker_line(geom, x, 0)).hit;

    record(r.positions[0], o.victim_action, x, o.probe_miss);
    r.prime_at_rollover += o.prime_start_at_rollover;
    ++r.trials;
    if (cfg.keep_outcomes) r.outcomes.push_back(o);
  }
  finish_report(r);
  return r;
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::prime_probe: return "prime_probe";
    case AttackKind::evict_time: return "evict_time";
    case AttackKind::lru: return "lru";
  }
  return "unknown";
}

AttackKind parse_attack_kind(std::string_view name) {
  for (auto k : {AttackKind::prime_probe, AttackKind::evict_time, AttackKind::lru})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown attack '" + std::string(name) + "' (expected prime_probe, evict_time or lru)");
}

LeakageReport run_attack(AttackKind kind, const CacheFactory& factory, const AttackConfig& cfg) {
  switch (kind) {
    case AttackKind::prime_probe: return run_prime_probe(factory, cfg);
    case AttackKind::evict_time: return run_evict_time(factory, cfg);
    case AttackKind::lru: return run_lru_attack(factory, cfg);
  }
  throw InternalError("unhandled attack kind");
}

void write_leakage_csv(std::ostream& out, const LeakageReport& r) {
  out << "# rng=" << kRngAlgorithm << '\n';
  out << "attack,model,seed,position,n_target,miss_target,n_other,miss_other,n_idle,miss_idle,"
         "p_miss_given_target,p_miss_given_other,posterior_target,best_rule,accuracy\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& p : r.positions) {
    out << r.attack << ',' << r.model << ',' << r.config.seed << ',' << p.position << ',' << p.n_target << ','
        << p.miss_target << ',' << p.n_other << ',' << p.miss_other << ',' << p.n_idle << ',' << p.miss_idle << ','
        << p.p_miss_given_target() << ',' << p.p_miss_given_other() << ',';
    if (auto post = p.posterior_target()) out << *post;
    out << ',' << p.best_rule() << ',' << p.accuracy() << '\n';
  }
  out << std::defaultfloat;
}

void write_leakage_summary(std::ostream& out, const LeakageReport& r) {
  const PositionStats& d = r.decision();
  out << std::fixed << std::setprecision(4);
  out << "attack: " << r.attack << "\nmodel: " << r.model << "\nvictim: " << to_string(r.config.victim)
      << "\ntarget addrset: " << r.config.target_addrset << "\ntrials: " << r.trials;
  if (r.precondition_failures > 0) out << " (" << r.precondition_failures << " setups discarded)";
  out << "\ndecision position: " << r.decision_position << "\nP(miss | target): " << d.p_miss_given_target()
      << " (n=" << d.n_target << ")\nP(miss | other): " << d.p_miss_given_other() << " (n=" << d.n_other
      << ")\nP(miss | idle): " << d.p_miss_given_idle() << " (n=" << d.n_idle << ")\nP(target | miss): ";
  if (auto post = d.posterior_target())
    out << *post;
  else
    out << "n/a";
  out << "\nbest rule: " << d.best_rule() << "\naccuracy: " << d.accuracy() << "\nchance: " << r.chance
      << "\nbinomial p-value: " << std::setprecision(6) << r.p_value << "\nverdict: "
      << (r.significantly_above_chance() ? "leaks (accuracy significantly above chance)"
                                         : "no significant leakage above chance")
      << '\n';
  out << std::defaultfloat;
}

}  // namespace rollingcache
