#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hbt/kernels.hpp"

namespace {

struct FirData {
  std::vector<double> taps;
  std::vector<std::complex<double>> in;
  std::vector<std::complex<double>> out;

  FirData(std::size_t n, std::size_t k) : taps(k), in(n + k - 1), out(n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& t : taps) t = g(rng);
    for (auto& x : in) x = {g(rng), g(rng)};
  }
};

struct TickData {
  std::vector<std::int64_t> a, b;
  hbt::kernels::LagBinning binning{1, 608};
  std::vector<std::uint64_t> bins;

  explicit TickData(std::size_t n) : a(n), b(n), bins(binning.bin_count()) {
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> gap(1.0 / 12000.0);  // ~1 MHz at 82.2 ps ticks
    double ta = 0, tb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ta += gap(rng);
      tb += gap(rng);
      a[i] = static_cast<std::int64_t>(ta);
      b[i] = static_cast<std::int64_t>(tb);
    }
  }
};

void BM_FirSerial(benchmark::State& state) {
  FirData d(static_cast<std::size_t>(state.range(0)), 129);
  for (auto _ : state) {
    hbt::kernels::fir_filter_serial(d.taps, d.in, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FirParallel(benchmark::State& state) {
  FirData d(static_cast<std::size_t>(state.range(0)), 129);
  for (auto _ : state) {
    hbt::kernels::fir_filter(d.taps, d.in, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorrelateSerial(benchmark::State& state) {
  TickData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::fill(d.bins.begin(), d.bins.end(), 0);
    hbt::kernels::correlate_ticks_serial(d.a, d.b, d.binning, d.bins);
    benchmark::DoNotOptimize(d.bins.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorrelateParallel(benchmark::State& state) {
  TickData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::fill(d.bins.begin(), d.bins.end(), 0);
    hbt::kernels::correlate_ticks(d.a, d.b, d.binning, d.bins);
    benchmark::DoNotOptimize(d.bins.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FirSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_FirParallel)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_CorrelateSerial)->Arg(1 << 18)->Arg(1 << 22);
BENCHMARK(BM_CorrelateParallel)->Arg(1 << 18)->Arg(1 << 22);

BENCHMARK_MAIN();
