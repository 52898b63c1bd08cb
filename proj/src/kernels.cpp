#include "hbt/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <omp.h>

namespace hbt::kernels {
namespace {

void check_fir_shapes(std::span<const double> taps, std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out) {
  if (taps.empty() || in.size() != out.size() + taps.size() - 1) {
    throw std::invalid_argument("fir_filter: input must hold out.size() + taps.size() - 1 samples");
  }
}

inline std::complex<double> fir_point(std::span<const double> taps, const std::complex<double>* x) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < taps.size(); ++j) {
    re += taps[j] * x[j].real();
    im += taps[j] * x[j].imag();
  }
  return {re, im};
}

constexpr std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

// Pairs for a_i in [first, last) with b searched from `j0`.
void correlate_range(std::span<const std::int64_t> a, std::size_t first, std::size_t last,
                     std::span<const std::int64_t> b, const LagBinning& binning,
                     std::uint64_t* bins) {
  const std::int64_t reach = binning.reach();
  auto j0 = static_cast<std::size_t>(
      std::lower_bound(b.begin(), b.end(), first < a.size() ? a[first] - reach : 0) - b.begin());
  for (std::size_t i = first; i < last; ++i) {
    const std::int64_t ta = a[i];
    while (j0 < b.size() && b[j0] < ta - reach) ++j0;
    for (std::size_t j = j0; j < b.size() && b[j] <= ta + reach; ++j) {
      const std::int64_t k = binning.index_of(b[j] - ta);
      if (binning.in_range(k)) ++bins[k + binning.half_bins];
    }
  }
}

}  // namespace

void fir_filter_serial(std::span<const double> taps, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) {
  check_fir_shapes(taps, in, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fir_point(taps, in.data() + i);
}

void fir_filter(std::span<const double> taps, std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out) {
  check_fir_shapes(taps, in, out);
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = fir_point(taps, in.data() + i);
}

std::int64_t LagBinning::index_of(std::int64_t delay) const {
  return floor_div(2 * delay + bin_ticks, 2 * bin_ticks);
}

void correlate_ticks_serial(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                            const LagBinning& binning, std::span<std::uint64_t> bins) {
  if (bins.size() != binning.bin_count()) throw std::invalid_argument("correlate: bin count mismatch");
  correlate_range(a, 0, a.size(), b, binning, bins.data());
}

void correlate_ticks(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                     const LagBinning& binning, std::span<std::uint64_t> bins) {
  if (bins.size() != binning.bin_count()) throw std::invalid_argument("correlate: bin count mismatch");
  const std::size_t nbins = bins.size();
  const int threads = std::max(1, omp_get_max_threads());
  // Integer counts, so the ordered merge is exact for any shard count.
  const std::size_t shards = std::min<std::size_t>(std::max<std::size_t>(1, a.size() / 4096),
                                                   static_cast<std::size_t>(threads) * 4);
  std::vector<std::uint64_t> partial(shards * nbins, 0);
  const auto nshards = static_cast<std::int64_t>(shards);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < nshards; ++s) {
    const std::size_t first = a.size() * static_cast<std::size_t>(s) / shards;
    const std::size_t last = a.size() * static_cast<std::size_t>(s + 1) / shards;
    correlate_range(a, first, last, b, binning, partial.data() + static_cast<std::size_t>(s) * nbins);
  }
  for (std::size_t s = 0; s < shards; ++s) {
    for (std::size_t k = 0; k < nbins; ++k) bins[k] += partial[s * nbins + k];
  }
}

}  // namespace hbt::kernels
