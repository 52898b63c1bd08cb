#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "hbt/optics.hpp"

using namespace hbt;

TEST_CASE("beam splitter routes every photon exactly once") {
  const PhotonStream in = emit_coherent_stream(from_seconds(0.01), 1e7, 1);
  const auto [a, b] = beam_split(in, 0.3, 2);
  CHECK(a.size() + b.size() == in.size());
  a.check_invariants();
  b.check_invariants();
  const double frac = static_cast<double>(a.size()) / static_cast<double>(in.size());
  CHECK(frac == doctest::Approx(0.3).epsilon(0.02));
  CHECK(a.duration == in.duration);
  CHECK_THROWS(beam_split(in, 1.5, 2));
}

TEST_CASE("delay line shifts arrivals and extends the duration") {
  PhotonStream in;
  in.duration = Femtoseconds{1000};
  in.arrivals = {1, 10, 999};
  const auto out = delay_stream(in, Femtoseconds{500});
  CHECK(out.arrivals == std::vector<std::int64_t>{501, 510, 1499});
  CHECK(out.duration == Femtoseconds{1500});
  PhotonStream edge;
  edge.duration = Femtoseconds{std::numeric_limits<std::int64_t>::max() - 5};
  edge.arrivals = {std::numeric_limits<std::int64_t>::max() - 10};
  CHECK_THROWS_AS(delay_stream(edge, Femtoseconds{100}), std::overflow_error);
}

TEST_CASE("attenuation thins with the requested survival probability") {
  const PhotonStream in = emit_coherent_stream(from_seconds(0.01), 1e7, 3);
  CHECK(attenuate(in, 1.0, 4).arrivals == in.arrivals);
  CHECK(attenuate(in, 0.0, 4).empty());
  const auto out = attenuate(in, 0.25, 4);
  CHECK(static_cast<double>(out.size()) / static_cast<double>(in.size()) == doctest::Approx(0.25).epsilon(0.02));
  CHECK_THROWS(attenuate(in, -0.1, 4));
}

TEST_CASE("pair source sends one photon of every pair to each output") {
  const auto [a, b] = simulate_pair_source(1e6, from_ps(0.5), from_seconds(0.01), 5);
  a.check_invariants();
  b.check_invariants();
  CHECK(a.size() == b.size());
  CHECK(static_cast<double>(a.size()) == doctest::Approx(1e4).epsilon(0.05));
  std::size_t close = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::llabs(a.arrivals[i] - b.arrivals[i]) <= 500) ++close;
  }
  CHECK(close == a.size());
}

TEST_CASE("michelson rate and delay conversion") {
  const SpectrumModel s{SpectrumShape::Gaussian, 2.8, 810.0};
  const ScanConfig scan;
  CHECK(michelson_rate(s, scan, 0.0) == doctest::Approx(200e3 * 1.9 + 5e3));
  CHECK(michelson_rate(s, scan, 1.0) == doctest::Approx(205e3).epsilon(1e-6));
  // one fringe per half wavelength of mirror travel
  CHECK(michelson_rate(s, scan, 810e-6 / 4.0) == doctest::Approx(200e3 * (1.0 - 0.9 * std::abs(analytic_g1(s, displacement_to_delay_ps(810e-6 / 4.0)))) + 5e3));
  CHECK(displacement_to_delay_ps(1.0) == doctest::Approx(2e-3 / kSpeedOfLight * 1e12));
}

TEST_CASE("michelson scan covers the range with Poisson counts") {
  const SpectrumModel s{SpectrumShape::Gaussian, 2.8, 810.0};
  ScanConfig scan;
  scan.scan_range_mm = 0.3;
  const Interferogram ifg = michelson_scan(s, scan, 7);
  CHECK(ifg.counts.size() == 75'000);
  CHECK(ifg.window_ms == 2.0);
  CHECK(ifg.positions_mm.front() == doctest::Approx(-0.15).epsilon(1e-3));
  // far from zero delay the mean count is (base + background) * window
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ifg.counts.size(); ++i) {
    if (std::abs(ifg.positions_mm[i]) > 0.05) {
      sum += ifg.counts[i];
      ++n;
    }
  }
  CHECK(sum / static_cast<double>(n) == doctest::Approx(410.0).epsilon(0.01));
  CHECK(michelson_scan(s, scan, 7).counts == ifg.counts);
}

TEST_CASE("scan config validation") {
  ScanConfig bad;
  bad.max_visibility = 1.2;
  CHECK_THROWS(bad.validate());
  bad = {};
  bad.window_ms = 0.0;
  CHECK_THROWS(bad.validate());
  CHECK_NOTHROW(ScanConfig{}.validate());
}
