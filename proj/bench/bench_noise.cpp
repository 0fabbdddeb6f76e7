// Serial reference vs OpenMP Monte-Carlo averaging of the covariance matrix.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "cvdyn/constants.hpp"
#include "cvdyn/robustness.hpp"

namespace {

cvdyn::NoiseProblem casimir_like(int cycles) {
  cvdyn::NoiseProblem p;
  p.protocol.omega1 = 2.0 * cvdyn::constants::pi * 100.0;
  p.protocol.omega2 = 0.5 * p.protocol.omega1;
  p.protocol.cycles = cycles;
  p.protocol.reverse = true;
  p.mass = 2.29e-16;
  p.coupling = cvdyn::ModeUnits(p.mass, p.protocol.omega1).to_si_coupling(-6.9e-7);
  return p;
}

void BM_AveragedSerial(benchmark::State& state) {
  const auto problem = casimir_like(static_cast<int>(state.range(0)));
  cvdyn::NoiseSpec noise{1e-4, 256, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cvdyn::averaged_covariance_reference(problem, noise).log_negativity);
  }
  state.SetItemsProcessed(state.iterations() * noise.samples);
}

void BM_AveragedParallel(benchmark::State& state) {
  const auto problem = casimir_like(static_cast<int>(state.range(0)));
  cvdyn::NoiseSpec noise{1e-4, 256, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cvdyn::averaged_covariance(problem, noise, 0).log_negativity);
  }
  state.SetItemsProcessed(state.iterations() * noise.samples);
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_AveragedSerial)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AveragedParallel)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
