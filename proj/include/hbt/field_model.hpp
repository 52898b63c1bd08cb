#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hbt/random.hpp"
#include "hbt/units.hpp"

namespace hbt {

enum class SpectrumShape { Gaussian, Lorentzian };

std::string_view to_string(SpectrumShape shape);
SpectrumShape spectrum_shape_from_string(std::string_view name);

/// Spectral model of one optical arm. The coherence time is the FWHM of |g1(tau)|.
struct SpectrumModel {
  SpectrumShape shape = SpectrumShape::Gaussian;
  double coherence_time_ps = 2.8;
  double center_wavelength_nm = 810.0;

  void validate() const;
};

/// Sampled complex field envelope with unit mean intensity.
struct FieldTrace {
  Femtoseconds dt{};
  std::vector<std::complex<double>> samples;
  std::uint64_t seed = 0;

  Femtoseconds duration() const { return dt * static_cast<std::int64_t>(samples.size()); }
};

/// Photon arrivals on one optical path, strictly increasing, within [0, duration].
struct PhotonStream {
  std::vector<std::int64_t> arrivals;  // fs
  Femtoseconds duration{};

  std::size_t size() const { return arrivals.size(); }
  bool empty() const { return arrivals.empty(); }
  double mean_rate() const;
  /// Throws std::logic_error when ordering or bounds are violated.
  void check_invariants() const;
};

/// Bose-Einstein photon-number distribution with mean nu.
struct ThermalDistribution {
  double nu = 0.0;
};

// Analytic references ------------------------------------------------------

/// Normalized first-order coherence (carrier removed). Both shapes are
/// parameterized so that |g1| has FWHM equal to the coherence time.
std::complex<double> analytic_g1(const SpectrumModel& spectrum, double tau_ps);
/// Thermal-light bunching law: 1 + |g1(tau)|^2.
double analytic_g2(const SpectrumModel& spectrum, double tau_ps);
/// Closed-form integral of |g1|^2 over all delays, in ps.
double analytic_g1_squared_area(const SpectrumModel& spectrum);
/// Smallest delay beyond which |g1| stays below `tolerance`.
double g1_support_ps(const SpectrumModel& spectrum, double tolerance);

/// P_n = nu^n / (nu + 1)^(n + 1).
double thermal_pn(ThermalDistribution dist, int n);

// Field synthesis -----------------------------------------------------------

/// Real moving-average taps whose autocorrelation reproduces g1 sampled on the
/// dt grid (transfer function = square root of the sampled spectrum). Taps
/// are normalized to unit energy.
std::vector<double> design_field_kernel(const SpectrumModel& spectrum, Femtoseconds dt);

/// Streaming circular-Gaussian field generator: filtered complex white noise.
/// Consecutive calls to generate() continue the same realization, so the
/// output does not depend on block sizes.
class ThermalFieldGenerator {
 public:
  ThermalFieldGenerator(const SpectrumModel& spectrum, Femtoseconds dt, std::uint64_t seed);

  void generate(std::span<std::complex<double>> out);
  std::span<const double> taps() const { return taps_; }
  Femtoseconds dt() const { return dt_; }

 private:
  void draw_noise(std::span<std::complex<double>> out);

  Femtoseconds dt_;
  std::vector<double> taps_;
  std::vector<std::complex<double>> history_;  // last taps_.size() - 1 noise samples
  std::vector<std::complex<double>> buffer_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

FieldTrace synthesize_thermal_field(const SpectrumModel& spectrum, Femtoseconds duration,
                                    Femtoseconds dt, std::uint64_t seed);
FieldTrace synthesize_coherent_field(Femtoseconds duration, Femtoseconds dt);

// Photon emission -----------------------------------------------------------

/// Per-sample Poisson emission with rate mean_rate * |E|^2. Arrivals are
/// spread uniformly (and distinctly) inside their sample interval. Streaming:
/// blocks must be fed in order.
class PhotonEmitter {
 public:
  PhotonEmitter(Femtoseconds dt, double mean_rate_hz, std::uint64_t seed);

  void emit(std::span<const std::complex<double>> block, std::int64_t first_sample,
            std::vector<std::int64_t>& arrivals);

 private:
  Femtoseconds dt_;
  double scale_;  // mean_rate * dt in photons per unit intensity
  Rng rng_;
  std::vector<std::int64_t> offsets_;
};

PhotonStream emit_photons(const FieldTrace& trace, double mean_rate_hz, std::uint64_t seed);

/// Streams a thermal field of the given duration through a PhotonEmitter
/// without holding the whole trace in memory. Identical to
/// emit_photons(synthesize_thermal_field(...)) for the same seeds.
PhotonStream emit_thermal_stream(const SpectrumModel& spectrum, Femtoseconds duration, Femtoseconds dt,
                                 double mean_rate_hz, std::uint64_t field_seed, std::uint64_t emit_seed);
/// Homogeneous Poisson arrivals (coherent source) in continuous time.
PhotonStream emit_coherent_stream(Femtoseconds duration, double mean_rate_hz, std::uint64_t seed);

// Continuous-time sparse sampler (long campaigns) ---------------------------

struct ThermalSamplerOptions {
  /// Intensity bound used for thinning; P(|E|^2 > cap) = exp(-cap).
  double intensity_cap = 12.0;
  /// Field values further apart than the delay where |g1| drops below this
  /// are treated as independent.
  double correlation_cutoff = 1e-9;
};

struct ThermalSamplerDiagnostics {
  std::uint64_t candidates = 0;
  std::uint64_t field_evaluations = 0;
  std::uint64_t clipped = 0;  // candidates with |E|^2 above the cap
};

/// Cox process with intensity mean_rate * |E(t)|^2 for a stationary circular
/// Gaussian field with covariance g1, sampled exactly at candidate times of a
/// dominating Poisson process (no time grid). Intended for campaigns whose
/// sampled trace would not fit in memory.
PhotonStream sample_thermal_photons(const SpectrumModel& spectrum, double mean_rate_hz,
                                    Femtoseconds duration, std::uint64_t seed,
                                    const ThermalSamplerOptions& options = {},
                                    ThermalSamplerDiagnostics* diagnostics = nullptr);

// Counting statistics -------------------------------------------------------

/// Number of arrivals in consecutive, disjoint windows covering [0, duration).
std::vector<std::uint32_t> window_counts(const PhotonStream& stream, Femtoseconds window);

struct CountMoments {
  double mean = 0.0;
  double variance = 0.0;
  double fano = 0.0;                 // variance / mean
  double normalized_factorial = 0.0; // <n(n-1)> / <n>^2
};
CountMoments count_moments(std::span<const std::uint32_t> counts);

/// Empirical distribution P(n) for n = 0..max over the windows.
std::vector<double> count_histogram(std::span<const std::uint32_t> counts);

}  // namespace hbt
