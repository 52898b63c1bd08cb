#include "hbt/detection.hpp"

#include <algorithm>
#include <cmath>

#include "hbt/units.hpp"

namespace hbt {

void DetectorConfig::validate() const {
  if (!(quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0)) {
    throw std::invalid_argument("detector: quantum efficiency must lie in [0, 1]");
  }
  if (dark_rate_hz < 0.0) throw std::invalid_argument("detector: dark rate must be non-negative");
  if (dead_time.count() < 0) throw std::invalid_argument("detector: dead time must be non-negative");
  if (tag_resolution.count() <= 0) throw std::invalid_argument("detector: tag resolution must be positive");
  if (const auto* g = std::get_if<GaussianJitter>(&jitter); g && g->fwhm_ps < 0.0) {
    throw std::invalid_argument("detector: jitter FWHM must be non-negative");
  }
  if (const auto* e = std::get_if<EmpiricalJitter>(&jitter)) {
    if (e->weights.empty() || e->edges_ps.size() != e->weights.size() + 1) {
      throw std::invalid_argument("detector: empirical jitter needs weights.size() + 1 edges");
    }
    double total = 0.0;
    for (double w : e->weights) {
      if (w < 0.0) throw std::invalid_argument("detector: empirical jitter weights must be non-negative");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("detector: empirical jitter histogram is empty");
    if (!std::is_sorted(e->edges_ps.begin(), e->edges_ps.end())) {
      throw std::invalid_argument("detector: empirical jitter edges must be ascending");
    }
  }
}

bool TagStream::is_sorted() const {
  return std::is_sorted(records.begin(), records.end(), [](const TagRecord& x, const TagRecord& y) {
    return x.tick != y.tick ? x.tick < y.tick : x.channel < y.channel;
  });
}

std::vector<std::int64_t> TagStream::channel_ticks(std::uint8_t channel) const {
  std::vector<std::int64_t> out;
  for (const auto& r : records) {
    if (r.channel == channel) out.push_back(static_cast<std::int64_t>(r.tick));
  }
  return out;
}

std::vector<std::int64_t> TagStream::ticks() const {
  std::vector<std::int64_t> out(records.size());
  std::transform(records.begin(), records.end(), out.begin(),
                 [](const TagRecord& r) { return static_cast<std::int64_t>(r.tick); });
  return out;
}

TagStream detect(const PhotonStream& stream, const DetectorConfig& detector, Femtoseconds duration,
                 std::uint64_t seed, DetectionDiagnostics* diagnostics) {
  detector.validate();
  if (duration.count() < 0) throw std::invalid_argument("detect: duration must be non-negative");
  DetectionDiagnostics diag;
  diag.photons_in = stream.size();

  std::vector<std::int64_t> events;
  events.reserve(static_cast<std::size_t>(detector.quantum_efficiency * static_cast<double>(stream.size()) +
                                          detector.dark_rate_hz * to_seconds(duration) * 1.1) + 64);

  // (1) quantum efficiency
  {
    Rng rng(derive_seed(seed, StreamTag::Efficiency));
    for (std::int64_t t : stream.arrivals) {
      if (detector.quantum_efficiency >= 1.0 || uniform01(rng) < detector.quantum_efficiency) events.push_back(t);
    }
    diag.detected_photons = events.size();
  }
  // (2) dark counts, homogeneous over [0, duration)
  if (detector.dark_rate_hz > 0.0 && duration.count() > 0) {
    Rng rng(derive_seed(seed, StreamTag::DarkCounts));
    std::poisson_distribution<std::uint64_t> count(detector.dark_rate_hz * to_seconds(duration));
    diag.dark_counts = count(rng);
    for (std::uint64_t i = 0; i < diag.dark_counts; ++i) {
      events.push_back(static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(duration.count())));
    }
  }
  // (3) timing jitter
  {
    Rng rng(derive_seed(seed, StreamTag::Jitter));
    if (const auto* g = std::get_if<GaussianJitter>(&detector.jitter)) {
      if (g->fwhm_ps > 0.0) {
        std::normal_distribution<double> normal(0.0, fwhm_to_sigma(g->fwhm_ps) * kFemtoPerPico);
        for (auto& t : events) t += std::llround(normal(rng));
      }
    } else {
      const auto& e = std::get<EmpiricalJitter>(detector.jitter);
      std::piecewise_constant_distribution<double> shape(e.edges_ps.begin(), e.edges_ps.end(), e.weights.begin());
      for (auto& t : events) t += std::llround(shape(rng) * kFemtoPerPico);
    }
  }
  // (4) re-sort, boundary policy
  std::sort(events.begin(), events.end());
  const auto first = std::lower_bound(events.begin(), events.end(), std::int64_t{0});
  const auto last = std::lower_bound(first, events.end(), duration.count());
  diag.dropped_at_boundary = static_cast<std::uint64_t>((first - events.begin()) + (events.end() - last));

  // (5) non-paralyzable dead time, (6) quantization
  TagStream out;
  out.resolution = detector.tag_resolution;
  const std::int64_t res = detector.tag_resolution.count();
  out.duration_ticks = static_cast<std::uint64_t>((duration.count() + res - 1) / res);
  out.records.reserve(static_cast<std::size_t>(last - first));
  const std::int64_t dead = detector.dead_time.count();
  bool have_last = false;
  std::int64_t last_kept = 0;
  for (auto it = first; it != last; ++it) {
    if (have_last && *it - last_kept < dead) {
      ++diag.lost_to_dead_time;
      continue;
    }
    have_last = true;
    last_kept = *it;
    out.records.push_back({detector.channel, static_cast<std::uint64_t>(*it / res)});
  }
  diag.tags_out = out.records.size();
  const double seconds = to_seconds(duration);
  diag.output_rate_hz = seconds > 0.0 ? static_cast<double>(diag.tags_out) / seconds : 0.0;
  diag.saturated = diag.output_rate_hz > detector.saturation_rate_hz;
  if (diagnostics) *diagnostics = diag;
  return out;
}

TagStream merge_tags(const TagStream& a, const TagStream& b) {
  if (a.resolution != b.resolution) throw std::invalid_argument("merge_tags: resolution mismatch");
  TagStream out;
  out.resolution = a.resolution;
  out.duration_ticks = std::max(a.duration_ticks, b.duration_ticks);
  out.records.resize(a.records.size() + b.records.size());
  std::merge(a.records.begin(), a.records.end(), b.records.begin(), b.records.end(), out.records.begin(),
             [](const TagRecord& x, const TagRecord& y) {
               return x.tick != y.tick ? x.tick < y.tick : x.channel < y.channel;
             });
  return out;
}

Femtoseconds InterArrivalHistogram::first_occupied() const {
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) return bin_width * static_cast<std::int64_t>(k);
  }
  return Femtoseconds{-1};
}

double InterArrivalHistogram::mean_interval_seconds() const {
  double n = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    n += static_cast<double>(counts[k]);
    sum += static_cast<double>(counts[k]) * (static_cast<double>(k) + 0.5);
  }
  return n > 0.0 ? sum / n * to_seconds(bin_width) : 0.0;
}

InterArrivalHistogram autocorrelation_deadtime_check(const TagStream& tags, Femtoseconds window,
                                                     Femtoseconds bin_width) {
  if (window.count() <= 0 || bin_width.count() <= 0) {
    throw std::invalid_argument("dead-time check: window and bin width must be positive");
  }
  for (std::size_t i = 1; i < tags.records.size(); ++i) {
    if (tags.records[i].channel != tags.records[0].channel) {
      throw std::invalid_argument("dead-time check: stream must hold a single channel");
    }
  }
  InterArrivalHistogram h;
  h.bin_width = bin_width;
  if (tags.records.size() < 2) return h;
  h.counts.assign(static_cast<std::size_t>((window.count() + bin_width.count() - 1) / bin_width.count()), 0);
  const std::int64_t res = tags.resolution.count();
  for (std::size_t i = 1; i < tags.records.size(); ++i) {
    const auto gap = static_cast<std::int64_t>(tags.records[i].tick - tags.records[i - 1].tick) * res;
    const auto k = static_cast<std::size_t>(gap / bin_width.count());
    if (k < h.counts.size()) ++h.counts[k];
  }
  return h;
}

}  // namespace hbt
