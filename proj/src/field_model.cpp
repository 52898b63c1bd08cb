#include "hbt/field_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hbt/kernels.hpp"

namespace hbt {
namespace {

constexpr double kLn2 = std::numbers::ln2;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Inversion sampling; the emitter only sees small means.
std::uint64_t draw_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean > 16.0) return std::poisson_distribution<std::uint64_t>(mean)(rng);
  const double u = uniform01(rng);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

std::string_view to_string(SpectrumShape shape) {
  return shape == SpectrumShape::Gaussian ? "gaussian" : "lorentzian";
}

SpectrumShape spectrum_shape_from_string(std::string_view name) {
  if (name == "gaussian") return SpectrumShape::Gaussian;
  if (name == "lorentzian") return SpectrumShape::Lorentzian;
  throw std::invalid_argument("unknown spectrum shape '" + std::string(name) + "'");
}

void SpectrumModel::validate() const {
  if (!(coherence_time_ps > 0.0)) throw std::invalid_argument("coherence time must be positive");
  if (!(center_wavelength_nm > 0.0)) throw std::invalid_argument("center wavelength must be positive");
}

double PhotonStream::mean_rate() const {
  const double t = to_seconds(duration);
  return t > 0.0 ? static_cast<double>(arrivals.size()) / t : 0.0;
}

void PhotonStream::check_invariants() const {
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (arrivals[i] < 0 || arrivals[i] > duration.count()) {
      throw std::logic_error("photon arrival outside [0, duration]");
    }
    if (i > 0 && arrivals[i] <= arrivals[i - 1]) throw std::logic_error("photon arrivals not strictly increasing");
  }
}

std::complex<double> analytic_g1(const SpectrumModel& spectrum, double tau_ps) {
  const double tc = spectrum.coherence_time_ps;
  switch (spectrum.shape) {
    case SpectrumShape::Gaussian:
      return std::exp(-4.0 * kLn2 * tau_ps * tau_ps / (tc * tc));
    case SpectrumShape::Lorentzian:
      return std::exp(-2.0 * kLn2 * std::abs(tau_ps) / tc);
  }
  return 0.0;
}

double analytic_g2(const SpectrumModel& spectrum, double tau_ps) {
  return 1.0 + std::norm(analytic_g1(spectrum, tau_ps));
}

double analytic_g1_squared_area(const SpectrumModel& spectrum) {
  const double tc = spectrum.coherence_time_ps;
  switch (spectrum.shape) {
    case SpectrumShape::Gaussian:
      return tc * std::sqrt(std::numbers::pi / (8.0 * kLn2));
    case SpectrumShape::Lorentzian:
      return tc / (2.0 * kLn2);
  }
  return 0.0;
}

double g1_support_ps(const SpectrumModel& spectrum, double tolerance) {
  const double tc = spectrum.coherence_time_ps;
  const double l = std::log(1.0 / tolerance);
  switch (spectrum.shape) {
    case SpectrumShape::Gaussian:
      return tc * std::sqrt(l / (4.0 * kLn2));
    case SpectrumShape::Lorentzian:
      return tc * l / (2.0 * kLn2);
  }
  return 0.0;
}

double thermal_pn(ThermalDistribution dist, int n) {
  if (n < 0) throw std::invalid_argument("thermal_pn: photon number must be non-negative");
  if (dist.nu < 0.0) throw std::invalid_argument("thermal_pn: mean photon number must be non-negative");
  if (dist.nu == 0.0) return n == 0 ? 1.0 : 0.0;
  // nu^n / (nu+1)^(n+1) in log space to stay finite for large n.
  const double nu = dist.nu;
  return std::exp(n * std::log(nu) - (n + 1) * std::log1p(nu));
}

std::vector<double> design_field_kernel(const SpectrumModel& spectrum, Femtoseconds dt) {
  spectrum.validate();
  if (dt.count() <= 0) throw std::invalid_argument("field kernel: dt must be positive");
  const double dt_ps = to_ps(dt);
  const auto support = static_cast<std::size_t>(std::ceil(g1_support_ps(spectrum, 1e-12) / dt_ps));
  const std::size_t n = next_pow2(std::max<std::size_t>(64, 4 * support));
  const std::size_t half = n / 2;

  std::vector<double> cos_table(n);
  for (std::size_t r = 0; r < n; ++r) cos_table[r] = std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / n);

  std::vector<double> g(half + 1);
  for (std::size_t m = 0; m <= half; ++m) g[m] = analytic_g1(spectrum, static_cast<double>(m) * dt_ps).real();

  // Even real sequence: cosine transforms over half the circle.
  auto even_transform = [&](const std::vector<double>& x) {
    std::vector<double> y(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
      double acc = x[0] + x[half] * cos_table[(k * half) % n];
      for (std::size_t m = 1; m < half; ++m) acc += 2.0 * x[m] * cos_table[(k * m) % n];
      y[k] = acc;
    }
    return y;
  };

  std::vector<double> amplitude = even_transform(g);
  for (double& s : amplitude) s = std::sqrt(std::max(s, 0.0));
  std::vector<double> h = even_transform(amplitude);
  for (double& v : h) v /= static_cast<double>(n);

  const double peak = std::abs(h[0]);
  std::size_t last = half;
  while (last > 0 && std::abs(h[last]) < 1e-10 * peak) --last;

  std::vector<double> taps(2 * last + 1);
  for (std::size_t m = 0; m <= last; ++m) {
    taps[last + m] = h[m];
    taps[last - m] = h[m];
  }
  double energy = 0.0;
  for (double v : taps) energy += v * v;
  const double norm = 1.0 / std::sqrt(energy);
  for (double& v : taps) v *= norm;
  return taps;
}

ThermalFieldGenerator::ThermalFieldGenerator(const SpectrumModel& spectrum, Femtoseconds dt, std::uint64_t seed)
    : dt_(dt), taps_(design_field_kernel(spectrum, dt)), rng_(derive_seed(seed, StreamTag::FieldNoise)) {
  history_.resize(taps_.size() - 1);
  draw_noise(history_);
}

void ThermalFieldGenerator::draw_noise(std::span<std::complex<double>> out) {
  const double s = std::numbers::sqrt2 / 2.0;
  for (auto& z : out) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    z = {s * re, s * im};
  }
}

void ThermalFieldGenerator::generate(std::span<std::complex<double>> out) {
  if (out.empty()) return;
  const std::size_t keep = history_.size();
  buffer_.resize(keep + out.size());
  std::copy(history_.begin(), history_.end(), buffer_.begin());
  draw_noise(std::span(buffer_).subspan(keep));
  kernels::fir_filter(taps_, buffer_, out);
  std::copy(buffer_.end() - static_cast<std::ptrdiff_t>(keep), buffer_.end(), history_.begin());
}

FieldTrace synthesize_thermal_field(const SpectrumModel& spectrum, Femtoseconds duration, Femtoseconds dt,
                                    std::uint64_t seed) {
  spectrum.validate();
  if (duration.count() <= 0) throw std::invalid_argument("thermal field: duration must be positive");
  if (dt.count() <= 0) throw std::invalid_argument("thermal field: dt must be positive");
  const Femtoseconds tc = from_ps(spectrum.coherence_time_ps);
  if (dt.count() * 10 > tc.count()) {
    throw std::invalid_argument("thermal field: dt exceeds coherence_time/10 (undersampled)");
  }
  if (duration.count() < 100 * tc.count()) {
    throw std::invalid_argument("thermal field: duration shorter than 100 coherence times");
  }
  FieldTrace trace;
  trace.dt = dt;
  trace.seed = seed;
  trace.samples.resize(static_cast<std::size_t>(duration.count() / dt.count()));
  ThermalFieldGenerator gen(spectrum, dt, seed);
  gen.generate(trace.samples);
  return trace;
}

FieldTrace synthesize_coherent_field(Femtoseconds duration, Femtoseconds dt) {
  if (duration.count() <= 0 || dt.count() <= 0) {
    throw std::invalid_argument("coherent field: duration and dt must be positive");
  }
  FieldTrace trace;
  trace.dt = dt;
  trace.samples.assign(static_cast<std::size_t>(duration.count() / dt.count()), {1.0, 0.0});
  return trace;
}

PhotonEmitter::PhotonEmitter(Femtoseconds dt, double mean_rate_hz, std::uint64_t seed)
    : dt_(dt), scale_(mean_rate_hz * to_seconds(dt)), rng_(derive_seed(seed, StreamTag::Emission)) {
  if (mean_rate_hz < 0.0) throw std::invalid_argument("emit_photons: rate must be non-negative");
  if (dt.count() <= 0) throw std::invalid_argument("emit_photons: dt must be positive");
  if (scale_ >= 0.1) throw std::invalid_argument("emit_photons: mean_rate * dt must stay below 0.1");
}

void PhotonEmitter::emit(std::span<const std::complex<double>> block, std::int64_t first_sample,
                         std::vector<std::int64_t>& arrivals) {
  const std::int64_t width = dt_.count();
  for (std::size_t i = 0; i < block.size(); ++i) {
    const std::uint64_t n = draw_poisson(rng_, scale_ * std::norm(block[i]));
    if (n == 0) continue;
    if (n > static_cast<std::uint64_t>(width)) {
      throw std::runtime_error("emit_photons: more photons than femtosecond slots in one sample");
    }
    offsets_.clear();
    while (offsets_.size() < n) {
      const auto off = static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(width));
      if (std::find(offsets_.begin(), offsets_.end(), off) == offsets_.end()) offsets_.push_back(off);
    }
    std::sort(offsets_.begin(), offsets_.end());
    const std::int64_t base = (first_sample + static_cast<std::int64_t>(i)) * width;
    for (std::int64_t off : offsets_) arrivals.push_back(base + off);
  }
}

PhotonStream emit_photons(const FieldTrace& trace, double mean_rate_hz, std::uint64_t seed) {
  PhotonStream out;
  out.duration = trace.duration();
  if (trace.samples.empty()) return out;
  PhotonEmitter emitter(trace.dt, mean_rate_hz, seed);
  emitter.emit(trace.samples, 0, out.arrivals);
  return out;
}

namespace {

template <class Fill>
PhotonStream emit_streamed(Femtoseconds duration, Femtoseconds dt, double mean_rate_hz, std::uint64_t emit_seed,
                           Fill&& fill) {
  PhotonStream out;
  const std::int64_t total = duration.count() / dt.count();
  out.duration = dt * total;
  PhotonEmitter emitter(dt, mean_rate_hz, emit_seed);
  constexpr std::int64_t kBlock = 1 << 20;
  std::vector<std::complex<double>> block;
  for (std::int64_t first = 0; first < total; first += kBlock) {
    block.resize(static_cast<std::size_t>(std::min(kBlock, total - first)));
    fill(std::span(block));
    emitter.emit(block, first, out.arrivals);
  }
  return out;
}

}  // namespace

PhotonStream emit_thermal_stream(const SpectrumModel& spectrum, Femtoseconds duration, Femtoseconds dt,
                                 double mean_rate_hz, std::uint64_t field_seed, std::uint64_t emit_seed) {
  spectrum.validate();
  if (duration.count() <= 0 || dt.count() <= 0) throw std::invalid_argument("thermal stream: bad duration or dt");
  ThermalFieldGenerator gen(spectrum, dt, field_seed);
  return emit_streamed(duration, dt, mean_rate_hz, emit_seed,
                       [&](std::span<std::complex<double>> b) { gen.generate(b); });
}

PhotonStream emit_coherent_stream(Femtoseconds duration, double mean_rate_hz, std::uint64_t seed) {
  if (duration.count() < 0 || mean_rate_hz < 0.0) throw std::invalid_argument("coherent stream: bad arguments");
  PhotonStream out;
  out.duration = duration;
  if (mean_rate_hz == 0.0) return out;
  Rng rng(derive_seed(seed, StreamTag::Emission));
  const double mean_gap = kFemtoPerSecond / mean_rate_hz;
  out.arrivals.reserve(static_cast<std::size_t>(to_seconds(duration) * mean_rate_hz * 1.01) + 16);
  double t = 0.0;
  std::int64_t last = -1;
  while (true) {
    t += -std::log1p(-uniform01(rng)) * mean_gap;
    auto ti = static_cast<std::int64_t>(t);
    if (ti <= last) ti = last + 1;
    if (ti >= duration.count()) break;
    out.arrivals.push_back(ti);
    last = ti;
  }
  return out;
}

std::vector<std::uint32_t> window_counts(const PhotonStream& stream, Femtoseconds window) {
  if (window.count() <= 0) throw std::invalid_argument("window_counts: window must be positive");
  const auto n = static_cast<std::size_t>(stream.duration.count() / window.count());
  std::vector<std::uint32_t> counts(n, 0);
  for (std::int64_t t : stream.arrivals) {
    const auto k = static_cast<std::size_t>(t / window.count());
    if (k < n) ++counts[k];
  }
  return counts;
}

CountMoments count_moments(std::span<const std::uint32_t> counts) {
  CountMoments m;
  if (counts.empty()) return m;
  double s1 = 0.0;
  double s2 = 0.0;
  for (auto c : counts) {
    s1 += c;
    s2 += static_cast<double>(c) * c;
  }
  const double n = static_cast<double>(counts.size());
  m.mean = s1 / n;
  m.variance = s2 / n - m.mean * m.mean;
  if (m.mean > 0.0) {
    m.fano = m.variance / m.mean;
    m.normalized_factorial = (s2 / n - m.mean) / (m.mean * m.mean);
  }
  return m;
}

std::vector<double> count_histogram(std::span<const std::uint32_t> counts) {
  std::uint32_t max = 0;
  for (auto c : counts) max = std::max(max, c);
  std::vector<double> p(counts.empty() ? 0 : max + 1, 0.0);
  for (auto c : counts) p[c] += 1.0;
  for (double& v : p) v /= static_cast<double>(counts.size());
  return p;
}

}  // namespace hbt
