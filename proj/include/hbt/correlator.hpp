#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hbt/detection.hpp"
#include "hbt/kernels.hpp"

namespace hbt {

/// Coincidence counts over signed delay t_b - t_a. Bin k covers the delays
/// centered on k * bin_width; the center bin straddles zero.
struct CorrelationHistogram {
  Femtoseconds bin_width{};
  std::int64_t half_bins = 0;
  std::vector<std::uint64_t> counts;
  double total_time_s = 0.0;
  std::uint64_t events_a = 0;
  std::uint64_t events_b = 0;

  std::size_t size() const { return counts.size(); }
  double delay_ps(std::size_t bin) const;
  double rate_a() const { return total_time_s > 0.0 ? static_cast<double>(events_a) / total_time_s : 0.0; }
  double rate_b() const { return total_time_s > 0.0 ? static_cast<double>(events_b) / total_time_s : 0.0; }
  /// Expected accidental coincidences per bin for independent streams: rate_a * rate_b * bin * T.
  double plateau_expectation() const;
  Femtoseconds max_lag() const { return bin_width * half_bins; }
};

struct CorrelateOptions {
  /// Subtracted from every b timestamp before pairing (software delay-line removal).
  Femtoseconds b_delay{0};
  bool parallel = true;
};

/// Counts every ordered pair with |t_b - t_a| inside the lag window (no
/// pairing exclusivity). Bins cover [-max_lag, +max_lag] in multiples of
/// bin_width, which must be an integer multiple of the shared tag resolution.
CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b, Femtoseconds bin_width,
                                     Femtoseconds max_lag, const CorrelateOptions& options = {});

/// Same, on raw ascending tick vectors (used for sharded/segmented runs).
CorrelationHistogram cross_correlate_ticks(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                           Femtoseconds resolution, double total_time_s, Femtoseconds bin_width,
                                           Femtoseconds max_lag, const CorrelateOptions& options = {});

/// Elementwise sum of histograms with identical geometry; times and event counts add.
void merge_into(CorrelationHistogram& total, const CorrelationHistogram& part);

struct G2Estimate {
  std::vector<double> delays_ps;
  std::vector<double> g2;
  std::vector<double> sigma;
  double plateau_mean = 0.0;
  std::size_t plateau_bins = 0;
  double bin_width_ps = 0.0;
};

/// Normalizes by the mean count of the bins with plateau_lo <= |delay| <= plateau_hi.
/// Per-bin sigma = sqrt(max(count, 1)) / plateau_mean.
G2Estimate normalize(const CorrelationHistogram& hist, Femtoseconds plateau_lo, Femtoseconds plateau_hi);

struct PeakReport {
  double height_excess = 0.0;   // max(g2 - 1) in the window
  double area_excess_ps = 0.0;  // sum (g2 - 1) * bin_width
  double area_sigma_ps = 0.0;
  double centroid_ps = 0.0;
  double significance = 0.0;    // area / propagated area error, signed
  std::size_t bins = 0;
};

/// Statistics of the excess over 1 for bins with delay in [peak_lo, peak_hi].
/// `smoothing` > 1 applies a centered moving average of that many bins before taking the maximum.
PeakReport peak_stats(const G2Estimate& g2, Femtoseconds peak_lo, Femtoseconds peak_hi, int smoothing = 1);

}  // namespace hbt
