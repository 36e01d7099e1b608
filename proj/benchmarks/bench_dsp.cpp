#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "biobench/dsp.hpp"
#include "biobench/rng.hpp"

namespace {

using namespace biobench;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1000, 1000);
  return v;
}

void BM_MorphBaseline(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  std::vector<double> y(x.size());
  KernelContext ctx;
  for (auto _ : state) {
    dsp::morph_baseline(x, y, 51, ctx);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MorphBaseline)->Arg(3840);

void BM_FftRadix2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::complex<double>> buf(n);
  const auto x = noise(n, 2);
  KernelContext ctx;
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    dsp::fft_radix2(buf, ctx);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FftRadix2)->Arg(512)->Arg(1024);

void BM_LombScargle(benchmark::State& state) {
  Rng rng(3);
  const std::size_t n = 64;
  std::vector<double> t(n), x(n);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 0.8 + 0.4 * rng.uniform();
    t[i] = acc;
    x[i] = std::sin(0.6 * acc);
  }
  std::vector<double> freqs;
  for (int i = 1; i <= 256; ++i) freqs.push_back(0.002 * i);
  KernelContext ctx;
  for (auto _ : state) {
    auto p = dsp::lomb_scargle(t, x, freqs, ctx);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(BM_LombScargle);

void BM_Mfcc(benchmark::State& state) {
  const auto x = noise(4800, 4);
  dsp::MfccParams params;
  KernelContext ctx;
  for (auto _ : state) {
    auto c = dsp::mfcc(x, 16000.0, params, ctx);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_Mfcc);

}  // namespace
