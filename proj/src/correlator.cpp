#include "hbt/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hbt {

double CorrelationHistogram::delay_ps(std::size_t bin) const {
  return static_cast<double>(static_cast<std::int64_t>(bin) - half_bins) * to_ps(bin_width);
}

double CorrelationHistogram::plateau_expectation() const {
  return rate_a() * rate_b() * to_seconds(bin_width) * total_time_s;
}

CorrelationHistogram cross_correlate_ticks(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                           Femtoseconds resolution, double total_time_s, Femtoseconds bin_width,
                                           Femtoseconds max_lag, const CorrelateOptions& options) {
  if (resolution.count() <= 0) throw std::invalid_argument("cross_correlate: resolution must be positive");
  if (bin_width.count() < resolution.count() || bin_width.count() % resolution.count() != 0) {
    throw std::invalid_argument("cross_correlate: bin width must be an integer multiple of the tag resolution");
  }
  if (max_lag.count() < 0) throw std::invalid_argument("cross_correlate: max lag must be non-negative");

  kernels::LagBinning binning;
  binning.bin_ticks = bin_width.count() / resolution.count();
  binning.half_bins = static_cast<std::int64_t>(std::llround(static_cast<double>(max_lag.count()) /
                                                             static_cast<double>(bin_width.count())));

  CorrelationHistogram h;
  h.bin_width = bin_width;
  h.half_bins = binning.half_bins;
  h.counts.assign(binning.bin_count(), 0);
  h.total_time_s = total_time_s;
  h.events_a = a.size();
  h.events_b = b.size();

  const std::int64_t shift = static_cast<std::int64_t>(
      std::llround(static_cast<double>(options.b_delay.count()) / static_cast<double>(resolution.count())));
  std::vector<std::int64_t> shifted;
  std::span<const std::int64_t> bb = b;
  if (shift != 0) {
    shifted.resize(b.size());
    std::transform(b.begin(), b.end(), shifted.begin(), [shift](std::int64_t t) { return t - shift; });
    bb = shifted;
  }
  if (options.parallel) {
    kernels::correlate_ticks(a, bb, binning, h.counts);
  } else {
    kernels::correlate_ticks_serial(a, bb, binning, h.counts);
  }
  return h;
}

CorrelationHistogram cross_correlate(const TagStream& a, const TagStream& b, Femtoseconds bin_width,
                                     Femtoseconds max_lag, const CorrelateOptions& options) {
  if (a.resolution != b.resolution) throw std::invalid_argument("cross_correlate: tag resolution mismatch");
  const auto ta = a.ticks();
  const auto tb = b.ticks();
  const double total = std::max(a.duration_seconds(), b.duration_seconds());
  return cross_correlate_ticks(ta, tb, a.resolution, total, bin_width, max_lag, options);
}

void merge_into(CorrelationHistogram& total, const CorrelationHistogram& part) {
  if (total.counts.empty() && total.total_time_s == 0.0) {
    total = part;
    return;
  }
  if (total.bin_width != part.bin_width || total.half_bins != part.half_bins) {
    throw std::invalid_argument("merge: histogram geometry mismatch");
  }
  for (std::size_t k = 0; k < total.counts.size(); ++k) total.counts[k] += part.counts[k];
  total.total_time_s += part.total_time_s;
  total.events_a += part.events_a;
  total.events_b += part.events_b;
}

G2Estimate normalize(const CorrelationHistogram& hist, Femtoseconds plateau_lo, Femtoseconds plateau_hi) {
  const double lo = to_ps(plateau_lo);
  const double hi = to_ps(plateau_hi);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double d = std::abs(hist.delay_ps(k));
    if (d >= lo && d <= hi) {
      sum += static_cast<double>(hist.counts[k]);
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("normalize: plateau region contains no bins");
  if (n < 100) throw std::invalid_argument("normalize: plateau region must contain at least 100 bins");
  if (sum <= 0.0) throw std::invalid_argument("normalize: plateau region holds no coincidences");

  G2Estimate est;
  est.plateau_mean = sum / static_cast<double>(n);
  est.plateau_bins = n;
  est.bin_width_ps = to_ps(hist.bin_width);
  est.delays_ps.resize(hist.size());
  est.g2.resize(hist.size());
  est.sigma.resize(hist.size());
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const auto c = static_cast<double>(hist.counts[k]);
    est.delays_ps[k] = hist.delay_ps(k);
    est.g2[k] = c / est.plateau_mean;
    est.sigma[k] = std::sqrt(std::max(c, 1.0)) / est.plateau_mean;
  }
  return est;
}

PeakReport peak_stats(const G2Estimate& g2, Femtoseconds peak_lo, Femtoseconds peak_hi, int smoothing) {
  const double lo = to_ps(peak_lo);
  const double hi = to_ps(peak_hi);
  if (!(hi > lo)) throw std::invalid_argument("peak_stats: empty peak window");
  if (smoothing < 1) throw std::invalid_argument("peak_stats: smoothing must be at least 1");
  if (g2.delays_ps.empty() || lo < g2.delays_ps.front() - g2.bin_width_ps || hi > g2.delays_ps.back() + g2.bin_width_ps) {
    throw std::invalid_argument("peak_stats: peak window outside the measured lags");
  }

  PeakReport r;
  double var = 0.0;
  double moment = 0.0;
  double height = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(g2.g2.size());
  const std::ptrdiff_t half = smoothing / 2;
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double d = g2.delays_ps[static_cast<std::size_t>(k)];
    if (d < lo || d > hi) continue;
    const double excess = g2.g2[static_cast<std::size_t>(k)] - 1.0;
    r.area_excess_ps += excess * g2.bin_width_ps;
    moment += excess * d;
    var += g2.sigma[static_cast<std::size_t>(k)] * g2.sigma[static_cast<std::size_t>(k)];
    ++r.bins;
    double smoothed = 0.0;
    int used = 0;
    for (std::ptrdiff_t j = k - half; j <= k + half; ++j) {
      if (j < 0 || j >= n) continue;
      smoothed += g2.g2[static_cast<std::size_t>(j)] - 1.0;
      ++used;
    }
    height = std::max(height, smoothed / used);
  }
  if (r.bins == 0) throw std::invalid_argument("peak_stats: no bins inside the peak window");
  r.height_excess = height;
  r.area_sigma_ps = std::sqrt(var) * g2.bin_width_ps;
  r.significance = r.area_sigma_ps > 0.0 ? r.area_excess_ps / r.area_sigma_ps : 0.0;
  const double total_excess = r.area_excess_ps / g2.bin_width_ps;
  r.centroid_ps = total_excess != 0.0 ? moment / total_excess : 0.0;
  return r;
}

}  // namespace hbt
