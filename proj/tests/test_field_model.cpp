#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "hbt/field_model.hpp"

using namespace hbt;

namespace {

// Independent numerical oracle: trapezoid integral of |g1|^2.
double numeric_g1sq_area(const SpectrumModel& s, double half_range, double step) {
  double sum = 0.0;
  for (double t = -half_range; t < half_range; t += step) {
    const double a = std::norm(analytic_g1(s, t));
    const double b = std::norm(analytic_g1(s, t + step));
    sum += 0.5 * (a + b) * step;
  }
  return sum;
}

}  // namespace

TEST_CASE("g1 has unit peak and FWHM equal to the coherence time") {
  for (auto shape : {SpectrumShape::Gaussian, SpectrumShape::Lorentzian}) {
    const SpectrumModel s{shape, 2.8, 810.0};
    CHECK(std::abs(analytic_g1(s, 0.0)) == doctest::Approx(1.0));
    CHECK(std::abs(analytic_g1(s, 1.4)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(analytic_g1(s, -1.4)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic_g2(s, 0.0) == doctest::Approx(2.0));
    CHECK(analytic_g2(s, 1e4) == doctest::Approx(1.0));
  }
}

TEST_CASE("squared g1 area matches numerical integration") {
  const SpectrumModel g{SpectrumShape::Gaussian, 2.8, 810.0};
  CHECK(analytic_g1_squared_area(g) == doctest::Approx(numeric_g1sq_area(g, 20.0, 1e-3)).epsilon(1e-6));
  CHECK(analytic_g1_squared_area(g) == doctest::Approx(2.11).epsilon(0.01));
  const SpectrumModel desk{SpectrumShape::Gaussian, 50.0, 810.0};
  CHECK(analytic_g1_squared_area(desk) == doctest::Approx(37.6).epsilon(0.002));
  const SpectrumModel l{SpectrumShape::Lorentzian, 2.8, 810.0};
  CHECK(analytic_g1_squared_area(l) == doctest::Approx(numeric_g1sq_area(l, 400.0, 1e-3)).epsilon(1e-5));
}

TEST_CASE("thermal_pn is the Bose-Einstein distribution") {
  CHECK(thermal_pn({1.0}, 0) == doctest::Approx(0.5));
  CHECK(thermal_pn({1.0}, 1) == doctest::Approx(0.25));
  CHECK(thermal_pn({0.0}, 0) == doctest::Approx(1.0));
  CHECK(thermal_pn({0.0}, 3) == doctest::Approx(0.0));
  for (double nu : {0.1, 0.5, 1.0, 4.0}) {
    double total = 0.0, mean = 0.0, fact2 = 0.0;
    for (int n = 0; n < 2000; ++n) {
      const double p = thermal_pn({nu}, n);
      total += p;
      mean += n * p;
      fact2 += static_cast<double>(n) * (n - 1) * p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean == doctest::Approx(nu).epsilon(1e-10));
    CHECK(fact2 == doctest::Approx(2.0 * nu * nu).epsilon(1e-9));
  }
  CHECK_THROWS(thermal_pn({1.0}, -1));
}

TEST_CASE("field kernel taps have unit energy and reproduce g1 on the grid") {
  const SpectrumModel s{SpectrumShape::Gaussian, 10.0, 810.0};
  const Femtoseconds dt{1000};
  const auto taps = design_field_kernel(s, dt);
  const double energy = std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
  CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));
  for (int lag : {0, 3, 6, 10, 15}) {
    double ac = 0.0;
    for (std::size_t j = 0; j + lag < taps.size(); ++j) ac += taps[j] * taps[j + static_cast<std::size_t>(lag)];
    CHECK(ac == doctest::Approx(std::abs(analytic_g1(s, lag * 1.0))).epsilon(2e-3));
  }
}

TEST_CASE("synthesized thermal field is circular Gaussian with unit mean intensity") {
  const SpectrumModel s{SpectrumShape::Gaussian, 10.0, 810.0};
  const auto trace = synthesize_thermal_field(s, from_ps(400'000.0), Femtoseconds{1000}, 5);
  REQUIRE(trace.samples.size() == 400'000);
  double i1 = 0.0, i2 = 0.0;
  std::complex<double> m = 0.0, pseudo = 0.0;
  for (const auto& e : trace.samples) {
    const double i = std::norm(e);
    i1 += i;
    i2 += i * i;
    m += e;
    pseudo += e * e;
  }
  const double n = static_cast<double>(trace.samples.size());
  CHECK(i1 / n == doctest::Approx(1.0).epsilon(0.03));
  // Exponential intensity: <I^2> = 2 <I>^2
  CHECK(i2 / n == doctest::Approx(2.0).epsilon(0.06));
  CHECK(std::abs(m / n) < 0.05);
  CHECK(std::abs(pseudo / n) < 0.05);
}

TEST_CASE("field synthesis rejects coarse sampling and short traces") {
  const SpectrumModel s{SpectrumShape::Gaussian, 10.0, 810.0};
  CHECK_THROWS_AS(synthesize_thermal_field(s, from_ps(10'000.0), Femtoseconds{2000}, 1), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_thermal_field(s, from_ps(500.0), Femtoseconds{1000}, 1), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_thermal_field(s, from_ps(10'000.0), Femtoseconds{0}, 1), std::invalid_argument);
}

TEST_CASE("generator output does not depend on block size") {
  const SpectrumModel s{SpectrumShape::Lorentzian, 10.0, 810.0};
  ThermalFieldGenerator g1(s, Femtoseconds{1000}, 9);
  ThermalFieldGenerator g2(s, Femtoseconds{1000}, 9);
  std::vector<std::complex<double>> whole(5000), parts(5000);
  g1.generate(whole);
  std::size_t pos = 0;
  for (std::size_t len : {1u, 17u, 1000u, 982u, 3000u}) {
    g2.generate(std::span(parts).subspan(pos, len));
    pos += len;
  }
  CHECK(whole == parts);
}

TEST_CASE("coherent field emission is Poissonian") {
  const auto trace = synthesize_coherent_field(from_ps(1e6), Femtoseconds{1000});
  CHECK(std::all_of(trace.samples.begin(), trace.samples.end(), [](auto e) { return e == std::complex<double>(1.0); }));
  const PhotonStream p = emit_photons(trace, 5e10, 3);
  p.check_invariants();
  const auto counts = window_counts(p, from_ps(100.0));
  const auto m = count_moments(counts);
  CHECK(m.mean == doctest::Approx(5.0).epsilon(0.02));
  CHECK(m.fano == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("emission rejects too many photons per sample") {
  const auto trace = synthesize_coherent_field(from_ps(1000.0), Femtoseconds{1000});
  CHECK_THROWS_AS(emit_photons(trace, 2e11, 1), std::invalid_argument);
}

TEST_CASE("streamed emission equals emission from a stored trace") {
  const SpectrumModel s{SpectrumShape::Gaussian, 10.0, 810.0};
  const auto trace = synthesize_thermal_field(s, from_ps(50'000.0), Femtoseconds{500}, 31);
  const PhotonStream a = emit_photons(trace, 1e11, 32);
  const PhotonStream b = emit_thermal_stream(s, from_ps(50'000.0), Femtoseconds{500}, 1e11, 31, 32);
  CHECK(a.arrivals == b.arrivals);
  CHECK(a.duration == b.duration);
}

TEST_CASE("photon stream invariants") {
  PhotonStream p;
  p.duration = Femtoseconds{100};
  p.arrivals = {1, 5, 5};
  CHECK_THROWS_AS(p.check_invariants(), std::logic_error);
  p.arrivals = {1, 5, 200};
  CHECK_THROWS_AS(p.check_invariants(), std::logic_error);
  p.arrivals = {1, 5, 99};
  CHECK_NOTHROW(p.check_invariants());
}

TEST_CASE("count moments of a known sequence") {
  const std::vector<std::uint32_t> c{0, 1, 2, 3, 4};
  const auto m = count_moments(c);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.variance == doctest::Approx(2.0));
  CHECK(m.fano == doctest::Approx(1.0));
  // <n(n-1)> = (0+0+2+6+12)/5 = 4
  CHECK(m.normalized_factorial == doctest::Approx(1.0));
  const auto h = count_histogram(c);
  REQUIRE(h.size() == 5);
  CHECK(h[2] == doctest::Approx(0.2));
}

TEST_CASE("spectrum shape names") {
  CHECK(spectrum_shape_from_string("gaussian") == SpectrumShape::Gaussian);
  CHECK(spectrum_shape_from_string("lorentzian") == SpectrumShape::Lorentzian);
  CHECK(to_string(SpectrumShape::Lorentzian) == "lorentzian");
  CHECK_THROWS(spectrum_shape_from_string("flat"));
  CHECK_THROWS((SpectrumModel{SpectrumShape::Gaussian, -1.0, 810.0}.validate()));
}
