// Sparse Cox-process sampler for thermal light.
//
// Candidates come from a homogeneous Poisson process at rate mean_rate * cap
// and are kept with probability |E(t)|^2 / cap. The field is only drawn at
// candidate times, each value conditioned on the previously drawn values that
// are still within the correlation support. A candidate with no drawn
// neighbour behind it and no candidate ahead of it within the support has an
// unconditional Exp(1) intensity, so it is accepted with the closed-form
// probability E[min(I, cap)] / cap and its field value is never needed.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hbt/field_model.hpp"

namespace hbt {
namespace {

struct FieldPoint {
  std::int64_t t;
  std::complex<double> e;
};

class ConditionalField {
 public:
  ConditionalField(const SpectrumModel& spectrum, std::uint64_t seed) : spectrum_(spectrum), rng_(seed) {}

  std::complex<double> draw(std::int64_t t, const std::vector<FieldPoint>& given) {
    const std::complex<double> z = standard_complex();
    const std::size_t n = given.size();
    if (n == 0) return z;
    if (n == 1) {
      const double k = g1(t - given[0].t);
      const double var = std::max(0.0, 1.0 - k * k);
      return k * given[0].e + std::sqrt(var) * z;
    }
    cov_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    cross_.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      cov_(ii, ii) = 1.0 + 1e-12;
      for (std::size_t j = 0; j < i; ++j) {
        const double v = g1(given[i].t - given[j].t);
        cov_(ii, static_cast<Eigen::Index>(j)) = v;
        cov_(static_cast<Eigen::Index>(j), ii) = v;
      }
      cross_(ii) = g1(t - given[i].t);
    }
    const Eigen::VectorXd w = cov_.ldlt().solve(cross_);
    std::complex<double> mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += w(static_cast<Eigen::Index>(i)) * given[i].e;
    const double var = std::max(0.0, 1.0 - cross_.dot(w));
    return mean + std::sqrt(var) * z;
  }

 private:
  double g1(std::int64_t delay_fs) const { return analytic_g1(spectrum_, static_cast<double>(delay_fs) * 1e-3).real(); }

  std::complex<double> standard_complex() {
    const double s = std::sqrt(0.5);
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    return {s * re, s * im};
  }

  SpectrumModel spectrum_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Eigen::MatrixXd cov_;
  Eigen::VectorXd cross_;
};

}  // namespace

PhotonStream sample_thermal_photons(const SpectrumModel& spectrum, double mean_rate_hz, Femtoseconds duration,
                                    std::uint64_t seed, const ThermalSamplerOptions& options,
                                    ThermalSamplerDiagnostics* diagnostics) {
  spectrum.validate();
  if (mean_rate_hz < 0.0) throw std::invalid_argument("thermal sampler: rate must be non-negative");
  if (duration.count() < 0) throw std::invalid_argument("thermal sampler: duration must be non-negative");
  if (!(options.intensity_cap > 1.0)) throw std::invalid_argument("thermal sampler: intensity cap must exceed 1");
  if (!(options.correlation_cutoff > 0.0 && options.correlation_cutoff < 1.0)) {
    throw std::invalid_argument("thermal sampler: correlation cutoff must lie in (0, 1)");
  }

  PhotonStream out;
  out.duration = duration;
  ThermalSamplerDiagnostics diag;
  if (mean_rate_hz == 0.0 || duration.count() == 0) {
    if (diagnostics) *diagnostics = diag;
    return out;
  }

  const double cap = options.intensity_cap;
  const double mean_gap = kFemtoPerSecond / (mean_rate_hz * cap);
  const auto support = static_cast<std::int64_t>(std::ceil(g1_support_ps(spectrum, options.correlation_cutoff) * 1e3));
  const double p_isolated = -std::expm1(-cap) / cap;

  Rng rng(derive_seed(seed, StreamTag::Emission));
  ConditionalField field(spectrum, derive_seed(seed, StreamTag::FieldNoise));
  out.arrivals.reserve(static_cast<std::size_t>(to_seconds(duration) * mean_rate_hz * 1.01) + 16);

  auto next_after = [&](std::int64_t t) {
    return t + static_cast<std::int64_t>(-std::log1p(-uniform01(rng)) * mean_gap);
  };

  std::vector<FieldPoint> recent;
  std::int64_t last = -1;
  std::int64_t current = next_after(0);
  while (current < duration.count()) {
    const std::int64_t next = next_after(current);
    ++diag.candidates;

    std::size_t drop = 0;
    while (drop < recent.size() && current - recent[drop].t > support) ++drop;
    if (drop > 0) recent.erase(recent.begin(), recent.begin() + static_cast<std::ptrdiff_t>(drop));

    bool accept = false;
    if (recent.empty() && next - current > support) {
      accept = uniform01(rng) < p_isolated;
    } else {
      const std::complex<double> e = field.draw(current, recent);
      ++diag.field_evaluations;
      const double intensity = std::norm(e);
      if (intensity > cap) ++diag.clipped;
      accept = uniform01(rng) * cap < intensity;
      recent.push_back({current, e});
    }
    if (accept) {
      const std::int64_t t = current > last ? current : last + 1;
      if (t < duration.count()) {
        out.arrivals.push_back(t);
        last = t;
      }
    }
    current = next;
  }
  if (diagnostics) *diagnostics = diag;
  return out;
}

}  // namespace hbt
