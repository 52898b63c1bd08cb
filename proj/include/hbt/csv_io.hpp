#pragma once

// Text artifacts. Every CSV starts with optional "# key=value" metadata lines
// followed by a header row. Doubles are written in shortest round-trip form,
// so identical inputs always produce identical bytes.
//
//   histogram.csv     delay_ps,counts        (# bin_width_fs, total_time_s, events_a, events_b)
//   g2.csv            delay_ps,g2,sigma      (# plateau_mean, plateau_bins, bin_width_ps)
//   jitter_curve.csv  delay_ps,value         (# bin_width_ps, area_ps)
//   prediction.csv    delay_ps,excess,g2     (# height, area_ps, shift_ps)
//   interferogram.csv position_mm,counts     (# window_ms)
//   envelope.csv      delay_ps,g1            (# vmax_raw)
//   residuals.csv     delay_ps,residual_sigma

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hbt/bunching_model.hpp"
#include "hbt/correlator.hpp"
#include "hbt/optics.hpp"

namespace hbt {

std::string format_double(double v);

/// Ordered key/value report ("key = value" per line).
class KeyValueReport {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  std::string text() const;
  void write(const std::filesystem::path& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_histogram_csv(const CorrelationHistogram& hist, const std::filesystem::path& path);
CorrelationHistogram read_histogram_csv(const std::filesystem::path& path);

void write_g2_csv(const G2Estimate& g2, const std::filesystem::path& path);
G2Estimate read_g2_csv(const std::filesystem::path& path);

void write_jitter_curve_csv(const JitterCurve& curve, const std::filesystem::path& path);
void write_prediction_csv(const PredictedPeak& prediction, const std::filesystem::path& path);
PredictedPeak read_prediction_csv(const std::filesystem::path& path);

void write_interferogram_csv(const Interferogram& ifg, const std::filesystem::path& path, int average = 1);
Interferogram read_interferogram_csv(const std::filesystem::path& path);
void write_envelope_csv(const EnvelopeCurve& env, const std::filesystem::path& path);

void write_residuals_csv(const ComparisonReport& report, const std::filesystem::path& path);

}  // namespace hbt
