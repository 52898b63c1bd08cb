#include "hbt/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "hbt/bunching_model.hpp"
#include "hbt/config.hpp"
#include "hbt/csv_io.hpp"
#include "hbt/kernels.hpp"
#include "hbt/multiphoton.hpp"
#include "hbt/pipeline.hpp"

namespace hbt {
namespace {

using Check = std::function<std::string(bool&)>;

SelfCheck run(const std::string& name, const Check& check) {
  SelfCheck r{name, false, ""};
  try {
    r.detail = check(r.passed);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

std::string g1_fwhm(bool& ok) {
  double worst = 0.0;
  for (auto shape : {SpectrumShape::Gaussian, SpectrumShape::Lorentzian}) {
    const SpectrumModel s{shape, 2.8, 810.0};
    worst = std::max(worst, std::abs(std::abs(analytic_g1(s, 1.4)) - 0.5));
    worst = std::max(worst, std::abs(analytic_g2(s, 0.0) - 2.0));
  }
  ok = worst < 1e-12;
  return "max deviation " + format_double(worst);
}

std::string g1_area(bool& ok) {
  const double area = analytic_g1_squared_area({SpectrumShape::Gaussian, 2.8, 810.0});
  const double expect = 2.8 * std::sqrt(std::numbers::pi / (8.0 * std::log(2.0)));
  ok = std::abs(area - expect) < 1e-12 && std::abs(area - 2.11) < 0.01;
  return "gaussian 2.8 ps -> " + format_double(area) + " ps";
}

std::string fock_thermal(bool& ok) {
  double worst = 0.0;
  for (double r : {0.1, 0.5, 1.0}) {
    const auto d = marginal_distribution(std::polar(r, 0.3), 20);
    worst = std::max(worst, d.max_thermal_deviation);
  }
  ok = worst < 1e-12;
  return "max |P_n - thermal| " + format_double(worst);
}

std::string polarization(bool& ok) {
  const Rational twin = same_polarization_probability(twin_state());
  const Rational sister = same_polarization_probability(sister_state());
  ok = twin == Rational(2, 3) && sister == Rational(1, 2) && uncorrelated_same_polarization_probability() == Rational(1, 2);
  std::ostringstream os;
  os << "twin " << twin.numerator() << '/' << twin.denominator() << ", sister " << sister.numerator() << '/'
     << sister.denominator();
  return os.str();
}

std::string tag_roundtrip(bool& ok) {
  Rng rng(7);
  TagStream t;
  t.resolution = Femtoseconds{82'200};
  std::uint64_t tick = 0;
  for (int i = 0; i < 100'000; ++i) {
    tick += rng() % 1000;
    t.records.push_back({static_cast<std::uint8_t>(rng() % 2), tick});
  }
  std::sort(t.records.begin(), t.records.end(),
            [](const TagRecord& a, const TagRecord& b) { return a.tick != b.tick ? a.tick < b.tick : a.channel < b.channel; });
  t.duration_ticks = tick + 1;
  const auto bytes = serialize_tags(t);
  const TagStream back = deserialize_tags(bytes);
  ok = back.records == t.records && back.resolution == t.resolution && back.duration_ticks == t.duration_ticks &&
       serialize_tags(back) == bytes;
  return std::to_string(t.records.size()) + " records";
}

std::string kernels_agree(bool& ok) {
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> taps(33);
  for (auto& x : taps) x = n(rng);
  std::vector<std::complex<double>> in(20'000 + taps.size() - 1);
  for (auto& x : in) x = {n(rng), n(rng)};
  std::vector<std::complex<double>> o1(20'000), o2(20'000);
  kernels::fir_filter_serial(taps, in, o1);
  kernels::fir_filter(taps, in, o2);
  std::vector<std::int64_t> a(50'000), b(50'000);
  std::int64_t ta = 0, tb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ta += static_cast<std::int64_t>(rng() % 40);
    tb += static_cast<std::int64_t>(rng() % 40);
    a[i] = ta;
    b[i] = tb;
  }
  kernels::LagBinning binning{3, 50};
  std::vector<std::uint64_t> h1(binning.bin_count()), h2(binning.bin_count());
  kernels::correlate_ticks_serial(a, b, binning, h1);
  kernels::correlate_ticks(a, b, binning, h2);
  ok = o1 == o2 && h1 == h2;
  return "fir and correlation bit-identical";
}

std::string paper_prediction(bool& ok) {
  JitterCurve j;
  j.bin_width_ps = 1.0;
  for (int k = -1000; k <= 1000; ++k) {
    j.delays_ps.push_back(k);
    j.values.push_back(std::abs(k) <= 305 ? 1.0 : 0.0);
  }
  j.area_ps = 611.0;
  const PredictedPeak p = predict_smeared_peak(j, 2.17, 0.0, 82.2);
  const double sig = predicted_significance(p.height, 4.4e6);
  ok = std::abs(p.height - 3.55e-3) < 0.005e-3 && sig >= 5.0;
  return "height " + format_double(p.height) + ", significance " + format_double(sig);
}

std::string dead_time(bool& ok) {
  const PhotonStream s = emit_coherent_stream(from_seconds(0.01), 5e6, 3);
  DetectorConfig d;
  const TagStream t = detect(s, d, s.duration, 4);
  const auto ticks = t.ticks();
  std::int64_t min_gap = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 1; i < ticks.size(); ++i) min_gap = std::min(min_gap, ticks[i] - ticks[i - 1]);
  const std::int64_t dead_ticks = d.dead_time.count() / d.tag_resolution.count();
  ok = min_gap >= dead_ticks;
  return "min gap " + std::to_string(min_gap) + " ticks, dead time " + std::to_string(dead_ticks) + " ticks";
}

std::string thermal_bunching(bool& ok) {
  const SpectrumModel s{SpectrumShape::Gaussian, 10.0, 810.0};
  const PhotonStream p = emit_thermal_stream(s, from_ps(8e6), Femtoseconds{1000}, 5e10, 21, 22);
  const auto [a, b] = beam_split(p, 0.5, 23);
  const auto h = cross_correlate_ticks(a.arrivals, b.arrivals, Femtoseconds{1}, to_seconds(p.duration),
                                       Femtoseconds{1000}, from_ps(120), {});
  const G2Estimate g = normalize(h, from_ps(40), from_ps(120));
  const double g0 = g.g2[static_cast<std::size_t>(h.half_bins)];
  ok = std::abs(g0 - 2.0) < 0.15;
  return "g2(0) = " + format_double(g0);
}

std::string strict_config(bool& ok) {
  bool rejected = false;
  try {
    parse_config(R"({"source": {"coherence_time": 3}})");
  } catch (const ConfigError& e) {
    rejected = std::string(e.what()).find("source.coherence_time") != std::string::npos;
  }
  const ExperimentConfig round = parse_config(config_to_json(ExperimentConfig::desk()));
  ok = rejected && config_to_json(round) == config_to_json(ExperimentConfig::desk());
  return rejected ? "unknown key rejected, defaults round-trip" : "unknown key accepted";
}

std::string determinism(bool& ok) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.run.duration_s = 0.004;
  c.run.segments = 2;
  c.calibration.duration_s = 0.004;
  const auto m1 = simulate_measurement(c);
  const auto m2 = simulate_measurement(c);
  ok = m1.histogram.counts == m2.histogram.counts && m1.histogram.events_a == m2.histogram.events_a &&
       m1.histogram.events_b == m2.histogram.events_b;
  return std::to_string(m1.histogram.events_a + m1.histogram.events_b) + " tags, identical histograms";
}

}  // namespace

std::vector<SelfCheck> run_selftest() {
  return {
      run("g1 coherence-time normalization", g1_fwhm),
      run("gaussian |g1|^2 area", g1_area),
      run("fock / thermal identity", fock_thermal),
      run("exact polarization probabilities", polarization),
      run("tag file round trip", tag_roundtrip),
      run("serial and parallel kernels agree", kernels_agree),
      run("paper prediction path", paper_prediction),
      run("dead-time gap", dead_time),
      run("thermal bunching g2(0)", thermal_bunching),
      run("strict config parsing", strict_config),
      run("seeded determinism", determinism),
  };
}

}  // namespace hbt
