#include <benchmark/benchmark.h>

#include "app/catalogue.hpp"
#include "fundsol/classify.hpp"
#include "fundsol/envelope.hpp"

namespace {

using fundsol::app::find_demo;

void BM_ConvexEnvelope(benchmark::State& state) {
  const auto& f = find_demo("eight_stage").flux;
  const double rho = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::convex_envelope(f, rho));
}
BENCHMARK(BM_ConvexEnvelope)->Arg(1)->Arg(6)->Arg(13);

void BM_ConcaveEnvelope(benchmark::State& state) {
  const auto& f = find_demo("eight_stage").flux;
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::concave_envelope(f, 13.0));
}
BENCHMARK(BM_ConcaveEnvelope);

// Brute-force reference hull, for scale against the exact construction.
void BM_EnvelopeOracle(benchmark::State& state) {
  const auto& f = find_demo("eight_stage").flux;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(fundsol::envelope_oracle(f, 13.0, n, fundsol::EnvelopeKind::convex));
  state.SetComplexityN(n);
}
BENCHMARK(BM_EnvelopeOracle)->RangeMultiplier(4)->Range(1024, 16384)->Complexity();

void BM_CriticalLevels(benchmark::State& state) {
  const auto& f = find_demo(state.range(0) == 0 ? "cubic" : "eight_stage").flux;
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::critical_levels(f, f.domain_max()));
}
BENCHMARK(BM_CriticalLevels)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClassifyShock(benchmark::State& state) {
  const auto& f = find_demo("cubic").flux;
  for (auto _ : state) benchmark::DoNotOptimize(fundsol::classify_shock(f, 1.5, 0.0));
}
BENCHMARK(BM_ClassifyShock);

}  // namespace
