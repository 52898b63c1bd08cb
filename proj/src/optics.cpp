#include "hbt/optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hbt {
namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void ScanConfig::validate() const {
  if (!(mirror_speed_mm_s > 0.0 && scan_range_mm > 0.0 && window_ms > 0.0)) {
    throw std::invalid_argument("scan: speed, range and window must be positive");
  }
  if (background_rate_hz < 0.0 || base_rate_hz < 0.0) throw std::invalid_argument("scan: rates must be non-negative");
  check_probability(max_visibility, "scan: max visibility");
}

std::pair<PhotonStream, PhotonStream> beam_split(const PhotonStream& stream, double transmittance,
                                                 std::uint64_t seed) {
  check_probability(transmittance, "beam_split: transmittance");
  Rng rng(derive_seed(seed, StreamTag::BeamSplit));
  std::pair<PhotonStream, PhotonStream> out;
  out.first.duration = stream.duration;
  out.second.duration = stream.duration;
  const auto expected = static_cast<std::size_t>(transmittance * static_cast<double>(stream.size()));
  out.first.arrivals.reserve(expected + 64);
  out.second.arrivals.reserve(stream.size() - std::min(expected, stream.size()) + 64);
  for (std::int64_t t : stream.arrivals) {
    (uniform01(rng) < transmittance ? out.first : out.second).arrivals.push_back(t);
  }
  return out;
}

PhotonStream delay_stream(const PhotonStream& stream, Femtoseconds delta) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  const std::int64_t d = delta.count();
  auto shift = [&](std::int64_t t) {
    if ((d > 0 && t > kMax - d) || (d < 0 && t < kMin - d)) {
      throw std::overflow_error("delay_stream: timestamp overflows the 64-bit range");
    }
    return t + d;
  };
  PhotonStream out;
  out.duration = Femtoseconds{d > 0 ? shift(stream.duration.count()) : stream.duration.count()};
  out.arrivals.resize(stream.size());
  std::transform(stream.arrivals.begin(), stream.arrivals.end(), out.arrivals.begin(), shift);
  return out;
}

PhotonStream attenuate(const PhotonStream& stream, double efficiency, std::uint64_t seed) {
  check_probability(efficiency, "attenuate: efficiency");
  PhotonStream out;
  out.duration = stream.duration;
  if (efficiency == 1.0) {
    out.arrivals = stream.arrivals;
    return out;
  }
  Rng rng(derive_seed(seed, StreamTag::Attenuation));
  out.arrivals.reserve(static_cast<std::size_t>(efficiency * static_cast<double>(stream.size())) + 64);
  for (std::int64_t t : stream.arrivals) {
    if (uniform01(rng) < efficiency) out.arrivals.push_back(t);
  }
  return out;
}

std::pair<PhotonStream, PhotonStream> simulate_pair_source(double pair_rate_hz, Femtoseconds pair_spread,
                                                           Femtoseconds duration, std::uint64_t seed) {
  if (pair_rate_hz < 0.0) throw std::invalid_argument("pair source: rate must be non-negative");
  if (pair_spread.count() < 0) throw std::invalid_argument("pair source: pair spread must be non-negative");
  const PhotonStream creation = emit_coherent_stream(duration, pair_rate_hz, derive_seed(seed, StreamTag::PairSource));
  std::pair<PhotonStream, PhotonStream> out;
  out.first.duration = duration;
  out.second.duration = duration;
  if (pair_spread.count() == 0) {
    out.first.arrivals = creation.arrivals;
    out.second.arrivals = creation.arrivals;
    return out;
  }
  Rng rng(derive_seed(seed, StreamTag::PairSource, 1));
  const double spread = static_cast<double>(pair_spread.count());
  auto displaced = [&](std::int64_t t) { return t + std::llround((uniform01(rng) - 0.5) * spread); };
  for (auto* arm : {&out.first, &out.second}) {
    arm->arrivals.reserve(creation.size());
    for (std::int64_t t : creation.arrivals) {
      const std::int64_t v = displaced(t);
      if (v >= 0 && v <= duration.count()) arm->arrivals.push_back(v);
    }
    // Displacements up to pair_spread/2 may swap neighbours or collide.
    std::sort(arm->arrivals.begin(), arm->arrivals.end());
    for (std::size_t i = 1; i < arm->arrivals.size(); ++i) {
      if (arm->arrivals[i] <= arm->arrivals[i - 1]) arm->arrivals[i] = arm->arrivals[i - 1] + 1;
    }
    while (!arm->arrivals.empty() && arm->arrivals.back() > duration.count()) arm->arrivals.pop_back();
  }
  return out;
}

double displacement_to_delay_ps(double x_mm) { return 2.0 * x_mm * 1e-3 / kSpeedOfLight * 1e12; }

double michelson_rate(const SpectrumModel& spectrum, const ScanConfig& scan, double x_mm) {
  const double tau_ps = displacement_to_delay_ps(x_mm);
  const double lambda_mm = spectrum.center_wavelength_nm * 1e-6;
  const double fringe = std::cos(4.0 * std::numbers::pi * x_mm / lambda_mm);
  return scan.base_rate_hz * (1.0 + scan.max_visibility * std::abs(analytic_g1(spectrum, tau_ps)) * fringe) +
         scan.background_rate_hz;
}

Interferogram michelson_scan(const SpectrumModel& spectrum, const ScanConfig& scan, std::uint64_t seed) {
  spectrum.validate();
  scan.validate();
  const double step_mm = scan.mirror_speed_mm_s * scan.window_ms * 1e-3;
  const auto windows = static_cast<std::size_t>(std::floor(scan.scan_range_mm / step_mm));
  Interferogram ifg;
  ifg.window_ms = scan.window_ms;
  ifg.positions_mm.resize(windows);
  ifg.counts.resize(windows);
  const double window_s = scan.window_ms * 1e-3;
  const double start = -0.5 * scan.scan_range_mm;
  // Fixed blocks of windows, one generator each: independent of thread scheduling.
  constexpr std::size_t kBlock = 1024;
  const auto blocks = static_cast<std::int64_t>((windows + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    Rng rng(derive_seed(seed, StreamTag::Scan, static_cast<std::uint64_t>(b)));
    const std::size_t first = static_cast<std::size_t>(b) * kBlock;
    const std::size_t last = std::min(windows, first + kBlock);
    for (std::size_t i = first; i < last; ++i) {
      const double x = start + (static_cast<double>(i) + 0.5) * step_mm;
      std::poisson_distribution<std::int64_t> counts(michelson_rate(spectrum, scan, x) * window_s);
      ifg.positions_mm[i] = x;
      ifg.counts[i] = static_cast<double>(counts(rng));
    }
  }
  return ifg;
}

}  // namespace hbt
