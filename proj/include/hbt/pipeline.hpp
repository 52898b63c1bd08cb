#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbt/bunching_model.hpp"
#include "hbt/config.hpp"
#include "hbt/correlator.hpp"
#include "hbt/csv_io.hpp"

namespace hbt {

/// Error raised inside one pipeline stage; what() is prefixed with the stage name.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct MeasurementResult {
  CorrelationHistogram histogram;
  std::array<DetectionDiagnostics, 2> detection;  // summed over segments
  ThermalSamplerDiagnostics sampler;
  std::vector<std::filesystem::path> tag_files;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Source -> split -> losses -> delay -> detection -> correlation, segment by
/// segment. Segments get independent seeds and are merged in index order.
/// When `tag_dir` is set every segment's merged tag stream is written there.
MeasurementResult simulate_measurement(const ExperimentConfig& config,
                                       const std::optional<std::filesystem::path>& tag_dir = std::nullopt,
                                       const ProgressFn& progress = {});

/// Pair-source calibration through the same delay line and detectors.
MeasurementResult simulate_calibration(const ExperimentConfig& config,
                                       const std::optional<std::filesystem::path>& tag_dir = std::nullopt);

struct G1AreaResult {
  double area_ps = 0.0;
  std::optional<Interferogram> interferogram;
  std::optional<EnvelopeCurve> envelope;
  std::vector<std::string> warnings;
};

G1AreaResult g1_squared_area(const ExperimentConfig& config);

struct PipelineResult {
  MeasurementResult measurement;
  MeasurementResult calibration;
  G2Estimate g2;
  JitterCurve jitter;
  G1AreaResult g1sq;
  PredictedPeak prediction;
  ComparisonReport comparison;
  std::vector<std::string> warnings;
};

struct PipelineOptions {
  std::optional<std::filesystem::path> out_dir;  // artifacts are written only when set
  ProgressFn progress;
};

/// Runs every stage and, when an output directory is given, writes:
/// config.json, histogram.csv, g2.csv, calibration_histogram.csv,
/// jitter_curve.csv, prediction.csv, residuals.csv, comparison.txt,
/// interferogram.csv / envelope.csv (scan-based area) and tags/ (if enabled).
/// On failure the files written so far are removed.
PipelineResult run_pipeline(const ExperimentConfig& config, const PipelineOptions& options = {});

KeyValueReport comparison_summary(const ComparisonReport& comparison, const PredictedPeak& prediction,
                                  const G2Estimate& g2);
KeyValueReport pipeline_summary(const PipelineResult& result, const ExperimentConfig& config);

void write_pipeline_artifacts(const PipelineResult& result, const ExperimentConfig& config,
                              const std::filesystem::path& out_dir);

}  // namespace hbt
