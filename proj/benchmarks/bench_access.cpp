#include <benchmark/benchmark.h>

#include "rollingcache/cache_model.hpp"
#include "rollingcache/trace.hpp"

namespace rc = rollingcache;

namespace {

rc::Trace workload(const rc::CacheGeometry& g) {
  rc::SyntheticSpec s;
  s.kind = rc::SyntheticKind::mixed;
  s.length = 1 << 16;
  s.footprint_lines = g.lines() * 4;
  return rc::gen_synthetic(s, g, 1);
}

void BM_Access(benchmark::State& state) {
  const auto kind = static_cast<rc::ModelKind>(state.range(0));
  rc::CacheGeometry g;
  g.num_sets = 2048;
  g.ways = static_cast<std::uint32_t>(state.range(1));
  const auto trace = workload(g);
  auto cache = rc::make_cache(kind, g, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.access(trace[i].address, trace[i].kind));
    if (++i == trace.size()) i = 0;
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(std::string(rc::to_string(kind)));
}

}  // namespace

BENCHMARK(BM_Access)->ArgsProduct({{0, 1, 2}, {4, 16}});

BENCHMARK_MAIN();
