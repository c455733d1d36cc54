// Serial reference versus OpenMP kernels on the convergence-experiment config.
#include <benchmark/benchmark.h>

#include "cyclocap/capacity.hpp"
#include "cyclocap/dcd_spectrum.hpp"
#include "cyclocap/finite_block.hpp"

namespace {

using namespace cyclocap;

PulseCorrelationModel baseline_model() { return {}; }

BlockCorrelation baseline_block(int n) {
  const Epsilon eps = Epsilon::parse("pi/7");
  const Rational en = eps_n(eps, n);
  const DtCorrelation dt(baseline_model(), SamplingSpec{2, Epsilon::rational(en.num, en.den), 0.0});
  return build_block_correlation(dt, static_cast<int>(2 * n + en.num));
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_SpectralEigs(benchmark::State& state) {
  const BlockCorrelation bc = baseline_block(static_cast<int>(state.range(1)));
  SpectralOptions opt;
  opt.exec = exec_of(state);
  opt.dense = state.range(2) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_eigs(bc, opt));
}
BENCHMARK(BM_SpectralEigs)
    ->ArgNames({"parallel", "n", "dense"})
    ->Args({0, 40, 0})
    ->Args({1, 40, 0})
    ->Args({0, 40, 1})
    ->Args({0, 7, 0})
    ->Args({1, 7, 0})
    ->Unit(benchmark::kMillisecond);

void BM_CnSequence(benchmark::State& state) {
  CnSequenceOptions opt;
  opt.n_min = 1;
  opt.n_max = 30;
  opt.spectral.n_theta = 256;
  opt.spectral.exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cn_sequence(baseline_model(), 2, Epsilon::parse("pi/7"), 10.0, opt));
  }
}
BENCHMARK(BM_CnSequence)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InfoDensity(benchmark::State& state) {
  const DtCorrelation dt(baseline_model(), SamplingSpec{2, Epsilon::rational(3, 7), 0.0});
  const BlockNoiseCov noise = block_noise_covariance(dt, 64, 0.0);
  const FiniteBlockSolution sol = waterfill_block(noise, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(info_density_stats(noise, sol.input_cov, 20000, 42, exec_of(state)));
  }
}
BENCHMARK(BM_InfoDensity)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
