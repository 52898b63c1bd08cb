#pragma once

// Data-parallel inner loops of the simulator. Each kernel has an OpenMP
// version used by the pipeline and a plain serial reference kept for tests
// and benchmarks; both produce bit-identical results.

#include <complex>
#include <cstdint>
#include <span>

namespace hbt::kernels {

/// out[i] = sum_j taps[j] * in[i + j]; requires in.size() == out.size() + taps.size() - 1.
void fir_filter_serial(std::span<const double> taps, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out);
void fir_filter(std::span<const double> taps, std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out);

/// Geometry of a signed-delay histogram in tick units. Bin k (k in
/// [-half_bins, half_bins]) holds delays d with floor((2d + w) / 2w) == k, so
/// the center bin straddles zero and odd widths are exactly symmetric.
struct LagBinning {
  std::int64_t bin_ticks = 1;
  std::int64_t half_bins = 0;

  std::size_t bin_count() const { return static_cast<std::size_t>(2 * half_bins + 1); }
  /// Signed bin index for a delay; check with in_range() before use.
  std::int64_t index_of(std::int64_t delay) const;
  bool in_range(std::int64_t index) const { return index >= -half_bins && index <= half_bins; }
  /// Largest |delay| that can land in a bin.
  std::int64_t reach() const { return half_bins * bin_ticks + bin_ticks; }
};

/// Accumulates every ordered pair (a_i, b_j) into bins[index_of(b_j - a_i) + half_bins].
/// Both inputs must be sorted ascending. `bins` must have binning.bin_count() entries.
void correlate_ticks_serial(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                            const LagBinning& binning, std::span<std::uint64_t> bins);
/// Sharded over `a`: each thread fills a private histogram; shards are summed in order.
void correlate_ticks(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                     const LagBinning& binning, std::span<std::uint64_t> bins);

}  // namespace hbt::kernels
