#include <benchmark/benchmark.h>

#include <map>

#include "a2g/campaign.hpp"
#include "a2g/rt_oracle.hpp"

using namespace a2g;

namespace {

// Urban grid of about n x n buildings, ABS at 120 m over the centre.
struct Scene {
  GridLayout layout;
  AbsState abs;
  Route route{{{0, 0}, {1, 0}}};
};

const Scene& scene(int n) {
  static std::map<int, Scene> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const ItuParams p = preset("Urban");
  const double side = (n + 0.5) * grid_dimensions(p).pitch();
  Rng rng = make_stream(11, "bench", static_cast<std::uint64_t>(n));
  Scene s;
  s.layout = generate_manhattan(p, side, rng);
  s.abs = AbsState({side / 2, side / 2}, 120.0);
  s.route = build_route(s.layout, RouteSpec{}, rng);
  return cache.emplace(n, std::move(s)).first->second;
}

void BM_TotalShadow(benchmark::State& state) {
  const Scene& s = scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_shadow(s.layout.buildings, s.abs, s.layout.bounds));
  }
  state.counters["buildings"] = static_cast<double>(s.layout.buildings.size());
}
BENCHMARK(BM_TotalShadow)->Arg(20)->Arg(30)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_RouteLabels(benchmark::State& state) {
  const Scene& s = scene(30);
  for (auto _ : state) {
    const Region shadow = route_shadow(s.layout.buildings, s.abs, s.layout.bounds, s.route);
    benchmark::DoNotOptimize(segment_route(s.route, shadow));
  }
}
BENCHMARK(BM_RouteLabels)->Unit(benchmark::kMillisecond);

void BM_RayTraceLabels(benchmark::State& state) {
  const Scene& s = scene(30);
  const double spm = (static_cast<double>(state.range(0)) - 0.5) / s.route.length();
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment_route_rt(s.route, spm, s.abs, s.layout.buildings));
  }
}
BENCHMARK(BM_RayTraceLabels)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Realization(benchmark::State& state) {
  CampaignConfig c;
  c.environments = {preset("DenseUrban")};
  int i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_realization(c, 0, i++));
  }
}
BENCHMARK(BM_Realization)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
