#include "rollingcache/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "rollingcache/attack.hpp"
#include "rollingcache/errors.hpp"
#include "rollingcache/stats.hpp"

namespace rollingcache {

double Proportion::std_error() const { return binomial_stderr(value(), trials); }

std::string_view to_string(StartState s) {
  switch (s) {
    case StartState::saturated: return "saturated";
    case StartState::warmed: return "warmed";
  }
  return "unknown";
}

StartState parse_start_state(std::string_view name) {
  if (name == "saturated") return StartState::saturated;
  if (name == "warmed") return StartState::warmed;
  throw ConfigError("unknown start state '" + std::string(name) + "' (expected saturated or warmed)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ok: return "ok";
    case Verdict::insufficient: return "insufficient";
    case Verdict::mismatch: return "mismatch";
  }
  return "unknown";
}

namespace {

RollingCache start_cache(const MonteCarloConfig& cfg, std::uint64_t seed, SetId target) {
  if (cfg.start == StartState::saturated) return RollingCache::saturated(cfg.geom, seed, target, cfg.options);
  CacheModel m(RollingCache(cfg.geom, seed, cfg.options));
  Stream wu = derive(seed, StreamLabel::warmup);
  warm_up(m, cfg.warmup.value_or(10 * cfg.geom.lines()), wu);
  return *m.rolling();
}

}  // namespace

MonteCarloEstimate monte_carlo(const MonteCarloConfig& cfg) {
  cfg.geom.validate();
  if (cfg.trials == 0) throw ConfigError("trials: must be >= 1");
  if (cfg.geom.num_sets < 2) throw ConfigError("sets: need S >= 2");
  const CacheGeometry& g = cfg.geom;
  const std::uint32_t len = cfg.prime_len == 0 ? 2 * g.ways : cfg.prime_len;

  MonteCarloEstimate est;
  est.trials = cfg.trials;
  est.positions = len;
  for (auto* v : {&est.retention, &est.miss_given_target, &est.miss_given_other, &est.miss_due_to_victim,
                  &est.posterior_target, &est.posterior_other})
    v->assign(len, {});

  const bool want_target = has(cfg.quantities, Quantity::miss_given_target);
  const bool want_other = has(cfg.quantities, Quantity::miss_given_other);
  const bool want_any = has(cfg.quantities, Quantity::miss_due_to_victim);

  std::vector<Address> prime(len);
  std::vector<bool> present(len);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t ts = child_seed(cfg.seed, t);
    Stream vs = derive(ts, StreamLabel::victim_policy);
    const auto x = static_cast<SetId>(vs.uniform_below(g.num_sets));
    RollingCache c = start_cache(cfg, ts, x);

    const std::uint32_t fc = c.entry(x).fill_count;
    ++est.prime_at_rollover.trials;
    est.prime_at_rollover.successes += (fc == 0 || fc == g.ways);

    for (std::uint32_t k = 0; k < len; ++k) {
      prime[k] = attacker_line(g, x, k);
      c.access(prime[k]);
    }
    for (std::uint32_t k = 0; k < len; ++k) {
      present[k] = c.contains(prime[k]);
      ++est.retention[k].trials;
      est.retention[k].successes += present[k];
    }

    auto evicted_by = [&](SetId victim, std::vector<Proportion>& out) {
      RollingCache v = c;
      v.access(victim_line(g, victim, 0));
      for (std::uint32_t k = 0; k < len; ++k) {
        ++out[k].trials;
        out[k].successes += present[k] && !v.contains(prime[k]);
      }
      return v;
    };

    if (want_target) evicted_by(x, est.miss_given_target);
    if (want_other) {
      auto o = static_cast<SetId>(vs.uniform_below(g.num_sets - 1));
      if (o >= x) ++o;
      evicted_by(o, est.miss_given_other);
    }
    if (want_any) {
      const auto a = static_cast<SetId>(vs.uniform_below(g.num_sets));
      const RollingCache v = evicted_by(a, est.miss_due_to_victim);
      for (std::uint32_t k = 0; k < len; ++k) {
        if (v.contains(prime[k])) continue;
        const bool caused = present[k];
        ++est.posterior_target[k].trials;
        ++est.posterior_other[k].trials;
        est.posterior_target[k].successes += caused && a == x;
        est.posterior_other[k].successes += caused && a != x;
      }
    }
  }
  return est;
}

namespace {

ComparisonRow make_row(std::string_view name, std::uint32_t x, double analytic, Proportion p, double z_limit) {
  ComparisonRow r;
  r.quantity = std::string(name);
  r.x = x;
  r.analytic = analytic;
  r.empirical = p.value();
  r.n = p.trials;
  r.std_error = binomial_stderr(analytic, p.trials);
  r.z_score = z_score(r.empirical, analytic, p.trials);
  const double tail = std::min(analytic, 1.0 - analytic);
  const double need = tail > 0.0 ? std::max(100.0, 10.0 / tail) : 100.0;
  if (static_cast<double>(p.trials) < need)
    r.verdict = Verdict::insufficient;
  else if (!(std::fabs(r.z_score) <= z_limit))
    r.verdict = Verdict::mismatch;
  return r;
}

Proportion complement(Proportion p) { return {p.trials - p.successes, p.trials}; }

}  // namespace

std::vector<ComparisonRow> compare(const ProbTable& table, const MonteCarloEstimate& est, double z_limit) {
  std::vector<ComparisonRow> rows;
  rows.push_back(make_row("prime_at_rollover", 0, table.scenario.p_a, est.prime_at_rollover, z_limit));
  const std::uint32_t n = std::min<std::uint32_t>(4, est.positions);

  auto add = [&](std::string_view name, const auto& analytic, const std::vector<Proportion>& emp, bool flip) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (emp[i].trials == 0) continue;
      rows.push_back(make_row(name, i + 1, analytic[i], flip ? complement(emp[i]) : emp[i], z_limit));
    }
  };
  auto add_opt = [&](std::string_view name, const std::array<std::optional<double>, 4>& analytic,
                     const std::vector<Proportion>& emp) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (emp[i].trials == 0 || !analytic[i]) continue;
      rows.push_back(make_row(name, i + 1, *analytic[i], emp[i], z_limit));
    }
  };

  add("retention", table.retention, est.retention, false);
  add("m_prime", table.m_prime, est.retention, true);
  add("miss_given_target", table.miss_given_target, est.miss_given_target, false);
  add("undetected", table.undetected, est.miss_given_target, true);
  add("miss_given_other", table.miss_given_other, est.miss_given_other, false);
  add("miss_due_to_victim", table.miss_due_to_victim, est.miss_due_to_victim, false);
  add_opt("posterior_target", table.posterior_target, est.posterior_target);
  add_opt("posterior_other", table.posterior_other, est.posterior_other);
  return rows;
}

bool all_ok(const std::vector<ComparisonRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.verdict == Verdict::ok; });
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "# rng=" << kRngAlgorithm << '\n';
  out << "quantity,x,analytic,empirical,stderr,z_score\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.quantity << ',' << r.x << ',' << r.analytic << ',' << r.empirical << ',' << r.std_error << ',';
    if (std::isfinite(r.z_score))
      out << std::setprecision(3) << r.z_score << std::setprecision(6);
    else
      out << (r.z_score > 0 ? "inf" : "-inf");
    out << '\n';
  }
  out << std::defaultfloat;
}

void write_comparison_verdicts(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ComparisonRow*>> groups;
  for (const auto& r : rows) {
    if (!groups.contains(r.quantity)) order.push_back(r.quantity);
    groups[r.quantity].push_back(&r);
  }
  for (const auto& q : order) {
    std::ostringstream detail;
    Verdict worst = Verdict::ok;
    for (const ComparisonRow* r : groups[q]) {
      if (r->verdict == Verdict::ok) continue;
      if (r->verdict == Verdict::mismatch || worst == Verdict::ok) worst = r->verdict;
      detail << " x=" << r->x << ':' << to_string(r->verdict);
      if (r->verdict == Verdict::mismatch)
        detail << "(z=" << std::fixed << std::setprecision(2) << r->z_score << std::defaultfloat << ')';
      else
        detail << "(n=" << r->n << ')';
    }
    out << q << ": " << to_string(worst);
    if (worst == Verdict::ok)
      out << " (all within tolerance)";
    else
      out << " -" << detail.str();
    out << '\n';
  }
  out << "overall: " << (all_ok(rows) ? "ok" : "FAILED") << '\n';
}

}  // namespace rollingcache
