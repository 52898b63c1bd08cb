#include "hbt/bunching_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace hbt {

EnvelopeCurve extract_envelope(const Interferogram& ifg, const EnvelopeOptions& options) {
  if (ifg.positions_mm.size() != ifg.counts.size()) throw std::invalid_argument("envelope: column length mismatch");
  if (ifg.positions_mm.size() < 2) throw std::invalid_argument("envelope: interferogram too short");
  if (options.window_fringes < 2) throw std::invalid_argument("envelope: window must span at least 2 fringes");
  if (!(ifg.window_ms > 0.0)) throw std::invalid_argument("envelope: interferogram window must be positive");

  const double step = (ifg.positions_mm.back() - ifg.positions_mm.front()) /
                      static_cast<double>(ifg.positions_mm.size() - 1);
  const double fringe_mm = options.center_wavelength_nm * 1e-6 / 2.0;
  const auto block = static_cast<std::size_t>(std::llround(options.window_fringes * fringe_mm / std::abs(step)));
  if (block < 4) throw std::invalid_argument("envelope: fewer than 4 windows per visibility block");
  const double wavenumber = 2.0 * std::numbers::pi / fringe_mm;
  const double background = options.background_rate_hz * ifg.window_ms * 1e-3;

  EnvelopeCurve env;
  std::vector<double> visibility;
  for (std::size_t first = 0; first + block <= ifg.counts.size(); first += block) {
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    double center = 0.0;
    for (std::size_t i = first; i < first + block; ++i) {
      double y = ifg.counts[i] - background;
      if (y < 0.0) {
        y = 0.0;
        ++env.clipped_windows;
      }
      const double x = ifg.positions_mm[i];
      const Eigen::Vector3d basis(1.0, std::cos(wavenumber * x), std::sin(wavenumber * x));
      normal += basis * basis.transpose();
      rhs += basis * y;
      center += x;
    }
    const Eigen::Vector3d coef = normal.ldlt().solve(rhs);
    const double amplitude = std::hypot(coef(1), coef(2));
    visibility.push_back(coef(0) > 0.0 ? amplitude / coef(0) : 0.0);
    env.delays_ps.push_back(displacement_to_delay_ps(center / static_cast<double>(block)));
  }
  if (visibility.empty()) throw std::invalid_argument("envelope: interferogram shorter than one block");
  env.vmax_raw = *std::max_element(visibility.begin(), visibility.end());
  if (!(env.vmax_raw > 1e-9)) throw std::runtime_error("envelope: no fringes (maximum visibility is zero)");
  env.values.resize(visibility.size());
  std::transform(visibility.begin(), visibility.end(), env.values.begin(),
                 [&](double v) { return v / env.vmax_raw; });
  return env;
}

double squared_envelope_area(const EnvelopeCurve& envelope) {
  const auto& x = envelope.delays_ps;
  const auto& y = envelope.values;
  if (x.size() != y.size()) throw std::invalid_argument("squared area: column length mismatch");
  if (x.size() < 3) throw std::invalid_argument("squared area: need at least 3 points");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (y[i] * y[i] + y[i - 1] * y[i - 1]) * (x[i] - x[i - 1]);
  return std::abs(area);
}

double curve_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm: need at least 3 points");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  auto crossing = [&](std::size_t i, std::size_t j) {
    return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
  };
  std::size_t l = peak;
  while (l > 0 && y[l - 1] > half) --l;
  std::size_t r = peak;
  while (r + 1 < y.size() && y[r + 1] > half) ++r;
  if (l == 0 || r + 1 == y.size()) throw std::runtime_error("fwhm: curve does not fall below half maximum");
  return crossing(r, r + 1) - crossing(l - 1, l);
}

JitterCurve normalize_jitter(const CorrelationHistogram& hist, Femtoseconds plateau_lo, Femtoseconds plateau_hi) {
  const G2Estimate est = normalize(hist, plateau_lo, plateau_hi);
  JitterCurve curve;
  curve.bin_width_ps = to_ps(hist.bin_width);
  curve.delays_ps = est.delays_ps;
  curve.values.resize(hist.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    curve.values[k] = static_cast<double>(hist.counts[k]) - est.plateau_mean;
    peak = std::max(peak, curve.values[k]);
  }
  if (!(peak > 0.0)) throw std::runtime_error("normalize_jitter: no coincidence peak above the plateau");
  for (double& v : curve.values) v /= peak;
  for (double v : curve.values) curve.area_ps += v * curve.bin_width_ps;
  if (!(curve.area_ps > 0.0)) throw std::runtime_error("normalize_jitter: non-positive jitter area");
  return curve;
}

double PredictedPeak::excess_at(double delay_ps) const {
  if (delays_ps.size() < 2) return 0.0;
  const double w = delays_ps[1] - delays_ps[0];
  const double pos = (delay_ps - delays_ps.front()) / w;
  if (pos < 0.0 || pos > static_cast<double>(delays_ps.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= delays_ps.size()) return excess.back();
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * excess[i] + f * excess[i + 1];
}

PredictedPeak predict_smeared_peak(const JitterCurve& jitter, double g1sq_area_ps, double shift_ps,
                                   double tag_resolution_ps) {
  if (!(g1sq_area_ps > 0.0)) throw std::invalid_argument("predict: |g1|^2 area must be positive");
  if (!(jitter.area_ps > 0.0)) throw std::invalid_argument("predict: jitter area must be positive");
  if (jitter.values.size() < 2 || jitter.delays_ps.size() != jitter.values.size()) {
    throw std::invalid_argument("predict: jitter curve needs at least two samples");
  }
  PredictedPeak p;
  p.height = g1sq_area_ps / jitter.area_ps;
  p.shift_ps = shift_ps;
  if (std::abs(shift_ps) > tag_resolution_ps) {
    p.warnings.push_back("lateral shift exceeds one tag-resolution unit");
  }
  p.delays_ps = jitter.delays_ps;
  p.excess.resize(jitter.values.size());
  const double w = jitter.bin_width_ps;
  const double x0 = jitter.delays_ps.front();
  const auto n = static_cast<std::ptrdiff_t>(jitter.values.size());
  for (std::size_t k = 0; k < p.excess.size(); ++k) {
    const double pos = (jitter.delays_ps[k] - shift_ps - x0) / w;
    const auto i = static_cast<std::ptrdiff_t>(std::floor(pos));
    const double f = pos - static_cast<double>(i);
    const double lo = (i >= 0 && i < n) ? jitter.values[static_cast<std::size_t>(i)] : 0.0;
    const double hi = (i + 1 >= 0 && i + 1 < n) ? jitter.values[static_cast<std::size_t>(i + 1)] : 0.0;
    p.excess[k] = p.height * ((1.0 - f) * lo + f * hi);
  }
  for (double e : p.excess) p.area_ps += e * w;
  return p;
}

double predicted_significance(double excess_height, double plateau_counts_per_bin) {
  if (!(plateau_counts_per_bin > 0.0)) throw std::invalid_argument("significance: plateau counts must be positive");
  return excess_height * std::sqrt(plateau_counts_per_bin);
}

double prediction_relative_error(double jitter_area_rel_error, double envelope_area_rel_error) {
  return std::hypot(jitter_area_rel_error, envelope_area_rel_error);
}

ComparisonReport compare_with_prediction(const G2Estimate& observed, const PredictedPeak& prediction,
                                         Femtoseconds peak_lo, Femtoseconds peak_hi) {
  ComparisonReport rep;
  rep.observed = peak_stats(observed, peak_lo, peak_hi);
  rep.predicted_height = prediction.height;
  rep.predicted_area_ps = prediction.area_ps;
  rep.model_relative_error = prediction_relative_error();

  const double lo = to_ps(peak_lo);
  const double hi = to_ps(peak_hi);
  double spp = 0.0;
  double syp = 0.0;
  double pmax = 0.0;
  for (std::size_t k = 0; k < observed.g2.size(); ++k) {
    const double d = observed.delays_ps[k];
    if (d < lo || d > hi) continue;
    const double p = prediction.excess_at(d);
    const double y = observed.g2[k] - 1.0;
    const double s2 = observed.sigma[k] * observed.sigma[k];
    spp += p * p / s2;
    syp += y * p / s2;
    pmax = std::max(pmax, p);
    rep.predicted_window_area_ps += p * observed.bin_width_ps;
    const double r = (y - p) / observed.sigma[k];
    rep.delays_ps.push_back(d);
    rep.residual_sigma.push_back(r);
    rep.chi2 += r * r;
    ++rep.dof;
  }
  if (spp > 0.0) {
    rep.fitted_scale = syp / spp;
    rep.fitted_scale_sigma = 1.0 / std::sqrt(spp);
  }
  rep.fitted_height = rep.fitted_scale * prediction.height;
  rep.height_ratio = pmax > 0.0 ? rep.observed.height_excess / pmax : 0.0;
  rep.area_ratio = prediction.area_ps > 0.0 ? rep.observed.area_excess_ps / prediction.area_ps : 0.0;
  return rep;
}

}  // namespace hbt
