#include <benchmark/benchmark.h>

#include "app/catalogue.hpp"
#include "fundsol/weno.hpp"

namespace {

void BM_WenoBurgers(benchmark::State& state) {
  const auto& f = fundsol::app::find_demo("burgers").flux;
  fundsol::WenoOptions opt;
  opt.cells = static_cast<int>(state.range(0));
  opt.x_lo = -0.5;
  opt.x_hi = 2.5;
  opt.t_end = 1.0;
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto g = fundsol::weno_run(f, fundsol::DeltaBox{}, opt);
    steps = g.steps;
    benchmark::DoNotOptimize(g.snapshots.back().u.data());
  }
  state.counters["steps"] = static_cast<double>(steps);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps * opt.cells));
}
BENCHMARK(BM_WenoBurgers)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_LocateShock(benchmark::State& state) {
  constexpr int n = 2048;
  const double dx = 1.0 / n;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = (i + 0.5) * dx < 0.6173 ? 1.0 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::locate_shock(u, 0.0, dx, 0.615));
}
BENCHMARK(BM_LocateShock);

}  // namespace
