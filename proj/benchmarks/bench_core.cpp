#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "rgds/matrix.hpp"
#include "rgds/pressure_engine.hpp"
#include "rgds/sampler_estimator.hpp"
#include "rgds/spec_io.hpp"

namespace {

rgds::SystemSpec spec(const char* name) { return rgds::load_spec(std::string(RGDS_BENCH_DATA) + "/" + name); }

void BM_PressureEvaluate(benchmark::State& state) {
  const auto s = spec("cantor_pair.json");
  rgds::PressureModel model(s, 0.01, {.threads = 1, .band = {}});
  model.prepare(static_cast<std::uint64_t>(state.range(0)), 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(0.72).log_psi_mean);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_PressureEvaluate)->Arg(100)->Arg(1000);

void BM_PressureEvaluateOverlapping(benchmark::State& state) {
  const auto s = spec("overlapping.json");
  rgds::PressureModel model(s, 0.01, {.threads = 1, .band = {}});
  model.prepare(500, 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(0.8).log_psi_mean);
}
BENCHMARK(BM_PressureEvaluateOverlapping);

void BM_SpectralRadius(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rgds::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(rgds::spectral_radius(m).value);
}
BENCHMARK(BM_SpectralRadius)->Arg(4)->Arg(32)->Arg(128);

void BM_GridCount(benchmark::State& state) {
  const auto s = spec("sierpinski_random.json");
  const auto cover = rgds::prefractal_cover(s, rgds::make_stream(s, 9), 0, 0.3, static_cast<std::uint32_t>(state.range(0)));
  const auto deltas = rgds::default_deltas(cover);
  for (auto _ : state)
    for (double d : deltas) benchmark::DoNotOptimize(rgds::grid_count(cover, d));
  state.counters["elements"] = static_cast<double>(cover.elements.size());
}
BENCHMARK(BM_GridCount)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
