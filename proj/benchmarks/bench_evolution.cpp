#include <benchmark/benchmark.h>

#include "app/catalogue.hpp"
#include "fundsol/evolution.hpp"

namespace {

using fundsol::app::find_demo;

void BM_StepTables(benchmark::State& state) {
  const auto& f = find_demo("cubic").flux;
  const double t0 = fundsol::default_t0(f, 1.0);
  const fundsol::SolverState s = fundsol::init_state(f, 1.0, t0);
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::step_tables(f, s, 0.01 * t0));
}
BENCHMARK(BM_StepTables)->Unit(benchmark::kMicrosecond);

void BM_RunToEnd(benchmark::State& state) {
  static const char* const names[] = {"burgers", "cubic", "eight_stage"};
  const auto& f = find_demo(names[state.range(0)]).flux;
  const double t_end = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::run(f, 1.0, t_end));
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_RunToEnd)->Args({0, 10})->Args({1, 50})->Args({2, 20})->Unit(benchmark::kMillisecond);

}  // namespace
