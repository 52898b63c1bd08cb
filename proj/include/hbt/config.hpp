#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "hbt/detection.hpp"
#include "hbt/field_model.hpp"
#include "hbt/optics.hpp"

namespace hbt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SourceKind { Thermal, Coherent };

struct SourceConfig {
  SourceKind kind = SourceKind::Thermal;
  SpectrumModel spectrum;
  double rate_hz = 4e6;          // photons/s entering the beam splitter
  double intensity_cap = 12.0;   // thinning bound of the continuous-time sampler
};

struct OpticsConfig {
  double transmittance = 0.5;    // fraction routed to detector A
  double delay_ns = 500.0;       // delay line in arm B
  double efficiency_a = 1.0;     // extra transmission losses per arm
  double efficiency_b = 1.0;
};

struct RunConfig {
  double duration_s = 200.0;
  int segments = 100;
  bool write_tags = false;
};

struct CorrelationConfig {
  double bin_width_ps = 82.2;
  double max_lag_ns = 50.0;
  double plateau_lo_ns = 10.0;
  double plateau_hi_ns = 50.0;
  double peak_lo_ps = -300.0;
  double peak_hi_ps = 300.0;
};

struct CalibrationConfig {
  double pair_rate_hz = 2e6;
  double pair_spread_ps = 0.5;
  double duration_s = 5.0;
  int segments = 1;
};

enum class G1AreaSource { Analytic, Scan, Value };

struct PredictionConfig {
  G1AreaSource g1sq_source = G1AreaSource::Analytic;
  double g1sq_area_ps = 0.0;     // used when the source is Value
  double shift_ps = 0.0;
  int window_fringes = 2;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  SourceConfig source;
  OpticsConfig optics;
  std::array<DetectorConfig, 2> detectors;
  RunConfig run;
  CorrelationConfig correlation;
  CalibrationConfig calibration;
  PredictionConfig prediction;
  ScanConfig scan;

  /// Scaled experiment that runs on a desktop (50 ps coherence, 200 ps combined jitter).
  static ExperimentConfig desk();
  /// Parameters of the original experiment (2.8 ps coherence, 640 ps combined jitter, 16 h).
  static ExperimentConfig paper();

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Strict JSON: every key must be known; missing keys keep the preset value.
/// An optional top-level "preset" ("desk" or "paper") selects the base.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace hbt
