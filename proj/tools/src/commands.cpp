#include "rcsim/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "rollingcache/analytics.hpp"
#include "rollingcache/attack.hpp"
#include "rollingcache/cache_model.hpp"
#include "rollingcache/errors.hpp"
#include "rollingcache/monte_carlo.hpp"
#include "rollingcache/simulate.hpp"
#include "rollingcache/trace.hpp"

namespace rcsim {

namespace rc = rollingcache;

namespace {

/// Data problems (unreadable or empty input) rather than bad flags.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeometryFlags {
  rc::CacheGeometry geom;
  std::string drain = "synchronous";
  std::uint32_t drain_delay = 4;

  void add(CLI::App* cmd) {
    cmd->add_option("--sets", geom.num_sets, "number of sets S (power of two)")->capture_default_str();
    cmd->add_option("--ways", geom.ways, "associativity W")->capture_default_str();
    cmd->add_option("--line-size", geom.line_size, "line size in bytes")->capture_default_str();
    cmd->add_option("--freelist", geom.freelist_len, "freelist length F")->capture_default_str();
    cmd->add_option("--addr-bits", geom.addr_bits, "physical address width")->capture_default_str();
    cmd->add_option("--drain", drain, "handling-register drain: synchronous|delayed")->capture_default_str();
    cmd->add_option("--drain-delay", drain_delay, "accesses a delayed drain stays live")->capture_default_str();
  }

  [[nodiscard]] rc::RollingCacheOptions options() const {
    rc::RollingCacheOptions o;
    if (drain == "synchronous")
      o.drain_mode = rc::DrainMode::synchronous;
    else if (drain == "delayed")
      o.drain_mode = rc::DrainMode::delayed;
    else
      throw rc::ConfigError("drain: expected synchronous or delayed, got '" + drain + "'");
    o.drain_delay = drain_delay;
    return o;
  }
};

struct TraceFlags {
  std::string file;
  std::string synthetic;
  rc::SyntheticSpec spec;
  std::string base = "0";

  void add(CLI::App* cmd, std::uint64_t default_length) {
    spec.length = default_length;
    auto* f = cmd->add_option("--trace", file, "trace file (R|W <hex> <instr_delta>)");
    auto* s = cmd->add_option("--synthetic", synthetic,
                              "synthetic trace: sequential|strided|uniform_random|conflict_storm|mixed|storm_suite");
    f->excludes(s);
    cmd->add_option("--length", spec.length, "synthetic records (storm_suite: per storm)")->capture_default_str();
    cmd->add_option("--base", base, "synthetic base address (hex)")->capture_default_str();
    cmd->add_option("--stride", spec.stride_lines, "strided: stride in lines")->capture_default_str();
    cmd->add_option("--footprint", spec.footprint_lines, "uniform_random/mixed: footprint in lines")
        ->capture_default_str();
    cmd->add_option("--addrset", spec.addrset, "conflict_storm: AddrSet")->capture_default_str();
    cmd->add_option("--distinct", spec.distinct, "conflict_storm: distinct lines (0 = length)")
        ->capture_default_str();
    cmd->add_flag("--shuffled", spec.shuffled, "conflict_storm: random order over the distinct lines");
    cmd->add_option("--hot-sets", spec.hot_sets, "mixed: hot AddrSets")->capture_default_str();
    cmd->add_option("--hot-fraction", spec.hot_fraction, "mixed: share of hot accesses")->capture_default_str();
    cmd->add_option("--write-fraction", spec.write_fraction, "probability a record is a write")
        ->capture_default_str();
  }

  rc::Trace load(const rc::CacheGeometry& geom, std::uint64_t seed, const std::string& fallback_kind) const {
    rc::Trace t;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw DataError("trace: cannot open '" + file + "'");
      try {
        t = rc::parse_trace(in);
      } catch (const rc::ParseError& e) {
        throw DataError("trace '" + file + "': " + e.what());
      }
    } else {
      const std::string kind = synthetic.empty() ? fallback_kind : synthetic;
      if (kind.empty()) throw rc::ConfigError("trace: give exactly one of --trace or --synthetic");
      if (kind == "storm_suite") return rc::conflict_storm_suite(geom, seed, spec.length);
      rc::SyntheticSpec s = spec;
      s.kind = rc::parse_synthetic_kind(kind);
      try {
        s.base = std::stoull(base, nullptr, 16);
      } catch (const std::exception&) {
        throw rc::ConfigError("base: '" + base + "' is not a hex address");
      }
      t = rc::gen_synthetic(s, geom, seed);
    }
    if (t.empty()) throw DataError("trace: no records");
    return t;
  }
};

/// Output stream for `path`, or `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DataError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

rc::CacheFactory factory_for(rc::ModelKind kind, const rc::CacheGeometry& geom, rc::RollingCacheOptions opts,
                             rc::StartState start, rc::SetId target) {
  if (start == rc::StartState::saturated) return rc::saturated_factory(kind, geom, target, opts);
  return rc::default_factory(kind, geom, opts);
}

void setup_simulate(CLI::App& app, std::function<int()>& action, std::ostream& out, std::ostream& err) {
  auto* cmd = app.add_subcommand("simulate", "run a trace through one or more cache models and write stats CSV");
  struct Flags {
    std::vector<std::string> models{"rolling"};
    GeometryFlags g;
    TraceFlags t;
    std::uint64_t seed = 1;
    std::uint32_t runs = 1;
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  cmd->add_option("--model", f->models, "rolling|lru|random (repeatable)")->capture_default_str();
  f->g.add(cmd);
  f->t.add(cmd, 100000);
  cmd->add_option("--seed", f->seed, "master seed")->capture_default_str();
  cmd->add_option("--runs", f->runs, "runs per model with seeds seed, seed+1, ...")->capture_default_str();
  cmd->add_option("--out", f->out, "stats CSV path (default stdout)");
  cmd->callback([f, &action, &out, &err] {
    action = [f, &out, &err]() {
      (void)err;
      f->g.geom.validate();
      if (f->runs == 0) throw rc::ConfigError("runs: must be >= 1");
      const auto opts = f->g.options();
      std::vector<rc::ModelKind> kinds;
      for (const auto& m : f->models) kinds.push_back(rc::parse_model_kind(m));
      std::vector<rc::SimStats> rows;
      for (std::uint32_t i = 0; i < f->runs; ++i) {
        const std::uint64_t seed = f->seed + i;
        const rc::Trace trace = f->t.load(f->g.geom, seed, "");
        for (auto k : kinds) {
          rc::CacheModel cache = rc::make_cache(k, f->g.geom, seed, opts);
          rc::SimResult r = rc::run_trace(cache, trace);
          r.stats.seed = seed;
          rows.push_back(r.stats);
        }
      }
      Sink sink(f->out, out);
      rc::write_stats_csv(*sink, rows);
      return kExitOk;
    };
  });
}

void setup_attack(CLI::App& app, std::function<int()>& action, std::ostream& out, std::ostream& err) {
  auto* cmd = app.add_subcommand("attack", "run a contention attack and write a leakage report");
  struct Flags {
    std::string attack = "prime_probe";
    std::string model = "rolling";
    std::string victim = "uniform_all";
    std::string start = "warmed";
    std::int64_t warmup = -1;
    GeometryFlags g;
    rc::AttackConfig cfg;
    std::string out;
    std::string summary;
  };
  auto f = std::make_shared<Flags>();
  f->g.geom.num_sets = 64;
  cmd->add_option("--attack", f->attack, "prime_probe|evict_time|lru")->capture_default_str();
  cmd->add_option("--model", f->model, "rolling|lru|random")->capture_default_str();
  f->g.add(cmd);
  cmd->add_option("--seed", f->cfg.seed, "master seed")->capture_default_str();
  cmd->add_option("--target", f->cfg.target_addrset, "target AddrSet")->capture_default_str();
  cmd->add_option("--prime-len", f->cfg.prime_len, "attacker prime/eviction accesses (0 = W)")
      ->capture_default_str();
  cmd->add_option("--probe-position", f->cfg.probe_position, "prime access probed (1-based)")
      ->capture_default_str();
  cmd->add_option("--victim", f->victim,
                  "access_target|access_other_uniform|idle|uniform_all|target_or_idle|target_or_other")
      ->capture_default_str();
  cmd->add_option("--victim-accesses", f->cfg.victim_accesses, "victim accesses per step")->capture_default_str();
  cmd->add_option("--trials", f->cfg.trials, "trials")->capture_default_str();
  cmd->add_option("--start", f->start, "trial start state: warmed|saturated")->capture_default_str();
  cmd->add_option("--warmup", f->warmup, "background accesses before each trial (-1 = 10*S*W)")
      ->capture_default_str();
  cmd->add_option("--alpha", f->cfg.alpha, "significance level of the binomial test")->capture_default_str();
  cmd->add_option("--out", f->out, "leakage CSV path (default stdout)");
  cmd->add_option("--summary", f->summary, "text summary path (default: stdout with --out, else stderr)");
  cmd->callback([f, &action, &out, &err] {
    action = [f, &out, &err]() {
      f->g.geom.validate();
      const auto kind = rc::parse_attack_kind(f->attack);
      const auto model = rc::parse_model_kind(f->model);
      f->cfg.victim = rc::parse_victim_policy(f->victim);
      const auto start = rc::parse_start_state(f->start);
      if (f->warmup >= 0)
        f->cfg.warmup = static_cast<std::uint64_t>(f->warmup);
      else if (start == rc::StartState::saturated)
        f->cfg.warmup = 0;
      if (f->cfg.target_addrset >= f->g.geom.num_sets)
        throw rc::ConfigError("target: AddrSet out of range");
      const auto factory = factory_for(model, f->g.geom, f->g.options(), start, f->cfg.target_addrset);
      const rc::LeakageReport report = rc::run_attack(kind, factory, f->cfg);
      Sink csv(f->out, out);
      rc::write_leakage_csv(*csv, report);
      Sink summary(f->summary, f->out.empty() ? err : out);
      rc::write_leakage_summary(*summary, report);
      return kExitOk;
    };
  });
}

void setup_verify(CLI::App& app, std::function<int()>& action, std::ostream& out, std::ostream& err) {
  auto* cmd = app.add_subcommand("verify", "compare closed-form probabilities with Monte Carlo on RollingCache");
  struct Flags {
    rc::MonteCarloConfig mc;
    std::string start = "saturated";
    std::int64_t warmup = -1;
    double z_limit = 3.0;
    std::string drain = "synchronous";
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  f->mc.geom.num_sets = 64;
  f->mc.geom.ways = 2;
  cmd->add_option("--sets", f->mc.geom.num_sets, "number of sets S")->capture_default_str();
  cmd->add_option("--ways", f->mc.geom.ways, "associativity W")->capture_default_str();
  cmd->add_option("--freelist", f->mc.geom.freelist_len, "freelist length F")->capture_default_str();
  cmd->add_option("--line-size", f->mc.geom.line_size, "line size in bytes")->capture_default_str();
  cmd->add_option("--addr-bits", f->mc.geom.addr_bits, "physical address width")->capture_default_str();
  cmd->add_option("--trials", f->mc.trials, "Monte-Carlo trials")->capture_default_str();
  cmd->add_option("--seed", f->mc.seed, "master seed")->capture_default_str();
  cmd->add_option("--prime-len", f->mc.prime_len, "attacker prime length (0 = 2W)")->capture_default_str();
  cmd->add_option("--start", f->start, "trial start state: saturated|warmed")->capture_default_str();
  cmd->add_option("--warmup", f->warmup, "warmed start: background accesses (-1 = 10*S*W)")->capture_default_str();
  cmd->add_option("--z-limit", f->z_limit, "largest accepted |z|")->capture_default_str();
  cmd->add_option("--out", f->out, "comparison CSV path (default stdout)");
  cmd->callback([f, &action, &out, &err] {
    action = [f, &out, &err]() {
      (void)err;
      f->mc.geom.validate();
      f->mc.start = rc::parse_start_state(f->start);
      if (f->warmup >= 0) f->mc.warmup = static_cast<std::uint64_t>(f->warmup);
      const rc::ProbTable table = rc::make_prob_table(f->mc.geom.ways, f->mc.geom.num_sets);
      const rc::MonteCarloEstimate est = rc::monte_carlo(f->mc);
      const auto rows = rc::compare(table, est, f->z_limit);
      Sink csv(f->out, out);
      rc::write_comparison_csv(*csv, rows);
      std::ostringstream verdicts;
      rc::write_comparison_verdicts(verdicts, rows);
      out << verdicts.str();
      return rc::all_ok(rows) ? kExitOk : kExitVerify;
    };
  });
}

void setup_footprint(CLI::App& app, std::function<int()>& action, std::ostream& out, std::ostream& err) {
  auto* cmd = app.add_subcommand("footprint", "record the active CacheSet of every access in a window");
  struct Flags {
    std::string model = "rolling";
    GeometryFlags g;
    TraceFlags t;
    std::uint64_t seed = 1;
    rc::FootprintWindow window;
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  f->g.geom.num_sets = 256;
  f->g.geom.ways = 4;
  f->t.spec.footprint_lines = 8192;
  f->t.spec.hot_sets = 16;
  cmd->add_option("--model", f->model, "rolling|lru|random")->capture_default_str();
  f->g.add(cmd);
  f->t.add(cmd, 5000);
  cmd->add_option("--seed", f->seed, "master seed")->capture_default_str();
  cmd->add_option("--window", f->window.length, "accesses recorded")->capture_default_str();
  cmd->add_option("--window-start", f->window.start, "first access recorded")->capture_default_str();
  cmd->add_option("--out", f->out, "footprint CSV path (default stdout)");
  cmd->callback([f, &action, &out, &err] {
    action = [f, &out, &err]() {
      f->g.geom.validate();
      const auto model = rc::parse_model_kind(f->model);
      const rc::Trace trace = f->t.load(f->g.geom, f->seed, "mixed");
      rc::CacheModel cache = rc::make_cache(model, f->g.geom, f->seed, f->g.options());
      const rc::SimResult r = rc::run_trace(cache, trace, f->window);
      if (r.window_truncated)
        err << "warning: window ends after the trace; recorded " << r.footprint.size() << " of "
            << f->window.length << " accesses\n";
      Sink csv(f->out, out);
      rc::write_footprint_csv(*csv, r.footprint);
      if (!f->out.empty())
        out << "max AddrSets sharing one active CacheSet: " << rc::max_addrsets_per_cacheset(r.footprint) << '\n';
      return kExitOk;
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rcsim: trace-driven RollingCache simulator and attack harness", "rcsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rcsim 0.1.0");
  std::function<int()> action;
  setup_simulate(app, action, out, err);
  setup_attack(app, action, out, err);
  setup_verify(app, action, out, err);
  setup_footprint(app, action, out, err);

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const rc::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const rc::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace rcsim
