// Serial reference vs OpenMP sweep, plus the BPM inner step.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "wgf/continuum.hpp"
#include "wgf/sweep.hpp"

namespace {

wgf::SweepSpec bench_spec() {
  wgf::SweepSpec spec;
  spec.base.n_sites = 3;
  spec.base.amplitude = 6.6;
  spec.base.omega = 3.0;
  spec.parameter = wgf::SweepParameter::omega2;
  spec.grid = wgf::linear_grid(0.0, 8.0, 32);
  spec.z_end = wgf::ZEndPolicy::parse("20T");
  spec.stepping = {400, 40};
  return spec;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = bench_spec();
  for (auto _ : state) benchmark::DoNotOptimize(wgf::run_sweep_serial(spec));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
  const auto spec = bench_spec();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wgf::run_sweep(spec, workers));
}
BENCHMARK(BM_SweepParallel)
    ->DenseRange(1, 1)
    ->Arg(omp_get_max_threads())
    ->Unit(benchmark::kMillisecond);

void BM_BpmPropagate(benchmark::State& state) {
  wgf::ContinuumConfig cfg;
  cfg.grid.n_x = static_cast<int>(state.range(0));
  cfg.grid.z_max = 20.0;
  const auto mode = wgf::fundamental_mode(cfg.p, cfg.w_x, cfg.grid);
  const auto input = wgf::launch_guide(cfg, mode, 0);
  wgf::BpmOptions opt;
  opt.record_every = 100;
  for (auto _ : state) benchmark::DoNotOptimize(wgf::bpm_propagate(cfg, input, opt));
}
BENCHMARK(BM_BpmPropagate)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
