#include <benchmark/benchmark.h>

#include <vector>

#include "mollify/distinguish.hpp"
#include "mollify/filter.hpp"
#include "mollify/rng.hpp"
#include "mollify/sde.hpp"

using namespace mollify;

namespace {

std::vector<double> noise(std::size_t n) {
  CounterRng rng(1, StreamTag::Coefficient, 0);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

void BM_ConvolveDirect(benchmark::State& state) {
  const auto x = noise(36289);
  const Kernel k = build_kernel(FilterSpec::gaussian(static_cast<double>(state.range(0)) / 4032.0 / 8.0), 1.0 / 4032.0);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(x, k));
}
BENCHMARK(BM_ConvolveDirect)->Arg(64)->Arg(256)->Arg(1024);

void BM_ConvolveFft(benchmark::State& state) {
  const auto x = noise(36289);
  const Kernel k = build_kernel(FilterSpec::gaussian(static_cast<double>(state.range(0)) / 4032.0 / 8.0), 1.0 / 4032.0);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_fft(x, k));
}
BENCHMARK(BM_ConvolveFft)->Arg(64)->Arg(256)->Arg(1024)->Arg(16128);

void BM_Integrate(benchmark::State& state) {
  const GridSpec g = GridSpec::make(1.0, 128.0 / 252.0, 4.0, 1.0 / 4032.0);
  const std::size_t n = g.model_count();
  const ParamPath mu{g, PathDomain::Model, std::vector<double>(n, 0.05), std::vector<double>(n, 0.2), {}};
  const BrownianIncrements bw = brownian(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(mu, bw, 100.0, 0.05));
}
BENCHMARK(BM_Integrate);

void BM_KsTwoSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto xs = noise(n), ys = noise(2 * n);
  const std::vector<double> tail(ys.begin() + static_cast<std::ptrdiff_t>(n), ys.end());
  for (auto _ : state) benchmark::DoNotOptimize(ks_two_sample(xs, tail));
}
BENCHMARK(BM_KsTwoSample)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
