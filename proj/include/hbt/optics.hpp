#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "hbt/field_model.hpp"

namespace hbt {

/// Michelson mirror scan parameters.
struct ScanConfig {
  double mirror_speed_mm_s = 0.002;
  double scan_range_mm = 3.0;
  double window_ms = 2.0;
  double background_rate_hz = 5e3;
  double max_visibility = 0.9;
  double base_rate_hz = 200e3;

  void validate() const;
};

struct Interferogram {
  std::vector<double> positions_mm;
  std::vector<double> counts;
  double window_ms = 0.0;  // integration window of every count
};

/// Routes each photon independently: output A with probability `transmittance`.
std::pair<PhotonStream, PhotonStream> beam_split(const PhotonStream& stream, double transmittance,
                                                 std::uint64_t seed);

/// Shifts every arrival by `delta`; the duration grows by max(delta, 0).
/// Throws std::overflow_error if a timestamp leaves the 64-bit range.
PhotonStream delay_stream(const PhotonStream& stream, Femtoseconds delta);

/// Bernoulli thinning with survival probability `efficiency`.
PhotonStream attenuate(const PhotonStream& stream, double efficiency, std::uint64_t seed);

/// Degenerate pair source: Poisson pair-creation times, each pair sends one
/// photon to each output, displaced uniformly within +-pair_spread/2.
std::pair<PhotonStream, PhotonStream> simulate_pair_source(double pair_rate_hz, Femtoseconds pair_spread,
                                                           Femtoseconds duration, std::uint64_t seed);

/// Expected windowed rate at mirror displacement x (mm).
double michelson_rate(const SpectrumModel& spectrum, const ScanConfig& scan, double x_mm);

/// Rate-level interferogram: Poisson counts per window over +-scan_range/2.
Interferogram michelson_scan(const SpectrumModel& spectrum, const ScanConfig& scan, std::uint64_t seed);

/// Mirror displacement (mm) to optical delay (ps); the path difference is twice the displacement.
double displacement_to_delay_ps(double x_mm);

}  // namespace hbt
