#pragma once

#include <string>
#include <vector>

#include "hbt/correlator.hpp"
#include "hbt/optics.hpp"

namespace hbt {

/// |g1| versus delay, rescaled so that the largest visibility maps to 1.
struct EnvelopeCurve {
  std::vector<double> delays_ps;
  std::vector<double> values;
  double vmax_raw = 0.0;
  std::size_t clipped_windows = 0;  // windows that went negative after background subtraction
};

/// Unit-peak coincidence profile of the detection chain and its area.
struct JitterCurve {
  std::vector<double> delays_ps;
  std::vector<double> values;
  double bin_width_ps = 0.0;
  double area_ps = 0.0;
};

struct EnvelopeOptions {
  double background_rate_hz = 5e3;
  int window_fringes = 2;
  double center_wavelength_nm = 810.0;
};

/// Splits the scan into consecutive blocks of `window_fringes` fringes, fits
/// mean + A cos + B sin at the known fringe frequency to the
/// background-subtracted counts of each block and takes the visibility
/// (max - min) / (max + min) of the fitted fringe. Delays use the doubled
/// mirror displacement.
EnvelopeCurve extract_envelope(const Interferogram& ifg, const EnvelopeOptions& options);

/// Trapezoidal integral of values^2 over delay, in ps.
double squared_envelope_area(const EnvelopeCurve& envelope);

/// Full width at half maximum of a sampled curve (linear interpolation of the crossings).
double curve_fwhm(const std::vector<double>& x, const std::vector<double>& y);

/// Subtracts the plateau level of a pair-source histogram and rescales to unit peak.
JitterCurve normalize_jitter(const CorrelationHistogram& hist, Femtoseconds plateau_lo, Femtoseconds plateau_hi);

struct PredictedPeak {
  std::vector<double> delays_ps;
  std::vector<double> excess;
  double height = 0.0;   // g1sq_area / jitter area
  double area_ps = 0.0;  // equals g1sq_area
  double shift_ps = 0.0;
  std::vector<std::string> warnings;

  double g2(std::size_t k) const { return 1.0 + excess[k]; }
  /// Linear interpolation of the excess at an arbitrary delay (0 outside the grid).
  double excess_at(double delay_ps) const;
};

/// Jitter profile rescaled to carry the area of |g1|^2, optionally shifted by
/// a sub-resolution offset (a warning is recorded when |shift| exceeds `tag_resolution_ps`).
PredictedPeak predict_smeared_peak(const JitterCurve& jitter, double g1sq_area_ps, double shift_ps,
                                   double tag_resolution_ps);

/// Expected significance of a peak-bin excess against the Poisson noise of a
/// plateau holding `plateau_counts_per_bin` coincidences: height * sqrt(N).
double predicted_significance(double excess_height, double plateau_counts_per_bin);

/// Relative model uncertainty from the jitter-area and envelope-area errors added in quadrature.
double prediction_relative_error(double jitter_area_rel_error = 0.03, double envelope_area_rel_error = 0.04);

struct ComparisonReport {
  PeakReport observed;
  double predicted_height = 0.0;
  double predicted_area_ps = 0.0;
  double predicted_window_area_ps = 0.0;  // prediction summed over the same peak window
  double fitted_scale = 0.0;              // least-squares amplitude of the prediction in the data
  double fitted_scale_sigma = 0.0;
  double fitted_height = 0.0;             // fitted_scale * predicted_height
  double height_ratio = 0.0;              // observed max-bin excess / predicted max excess on the grid
  double area_ratio = 0.0;                // observed window area / predicted area
  double chi2 = 0.0;
  std::size_t dof = 0;
  double model_relative_error = 0.0;
  std::vector<double> delays_ps;
  std::vector<double> residual_sigma;     // (observed - predicted) / sigma per bin in the window
};

ComparisonReport compare_with_prediction(const G2Estimate& observed, const PredictedPeak& prediction,
                                         Femtoseconds peak_lo, Femtoseconds peak_hi);

}  // namespace hbt
