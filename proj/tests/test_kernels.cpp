#include <doctest.h>

#include <random>
#include <vector>

#include "hbt/kernels.hpp"

using namespace hbt::kernels;

namespace {

// Brute-force oracle: every pair, explicit rounding of the bin index.
std::vector<std::uint64_t> brute(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                 std::int64_t w, std::int64_t half) {
  std::vector<std::uint64_t> bins(static_cast<std::size_t>(2 * half + 1));
  for (auto x : a) {
    for (auto y : b) {
      const long double idx = std::floor((static_cast<long double>(y - x) + 0.5L * w) / w);
      if (idx >= -half && idx <= half) ++bins[static_cast<std::size_t>(idx + half)];
    }
  }
  return bins;
}

std::vector<std::int64_t> ticks(std::mt19937_64& rng, std::size_t n, int gap) {
  std::vector<std::int64_t> t(n);
  std::int64_t now = 0;
  for (auto& x : t) {
    now += static_cast<std::int64_t>(rng() % static_cast<unsigned>(gap));
    x = now;
  }
  return t;
}

}  // namespace

TEST_CASE("lag binning centers bin zero on zero delay") {
  LagBinning b{4, 3};
  CHECK(b.index_of(0) == 0);
  CHECK(b.index_of(1) == 0);
  CHECK(b.index_of(-2) == 0);
  CHECK(b.index_of(2) == 1);
  CHECK(b.index_of(-3) == -1);
  LagBinning odd{3, 3};
  for (std::int64_t d = 0; d < 30; ++d) CHECK(odd.index_of(d) == -odd.index_of(-d));
}

TEST_CASE("correlation kernels match the brute-force oracle") {
  std::mt19937_64 rng(3);
  for (std::int64_t w : {1, 3, 4}) {
    const auto a = ticks(rng, 700, 20);
    const auto b = ticks(rng, 650, 21);
    LagBinning binning{w, 12};
    std::vector<std::uint64_t> s(binning.bin_count()), p(binning.bin_count());
    correlate_ticks_serial(a, b, binning, s);
    correlate_ticks(a, b, binning, p);
    CHECK(s == brute(a, b, w, 12));
    CHECK(p == s);
  }
}

TEST_CASE("sharded correlation is bin-exact on a large input") {
  std::mt19937_64 rng(4);
  const auto a = ticks(rng, 200'000, 50);
  const auto b = ticks(rng, 200'000, 50);
  LagBinning binning{2, 100};
  std::vector<std::uint64_t> s(binning.bin_count()), p(binning.bin_count());
  correlate_ticks_serial(a, b, binning, s);
  correlate_ticks(a, b, binning, p);
  CHECK(s == p);
}

TEST_CASE("fir kernels agree and compute a moving sum") {
  std::vector<double> taps{1.0, 2.0, -1.0};
  std::vector<std::complex<double>> in{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 0}};
  std::vector<std::complex<double>> s(3), p(3);
  fir_filter_serial(taps, in, s);
  fir_filter(taps, in, p);
  CHECK(s == p);
  CHECK(s[0] == std::complex<double>(1.0 - 2.0, 2.0));
  CHECK(s[1] == std::complex<double>(4.0 - 1.0, 1.0 - 1.0));
  std::vector<std::complex<double>> bad(4);
  CHECK_THROWS(fir_filter_serial(taps, in, bad));
}
