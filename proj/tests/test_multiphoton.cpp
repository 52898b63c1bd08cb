#include <doctest.h>

#include <cmath>

#include "hbt/multiphoton.hpp"

using namespace hbt;

TEST_CASE("vacuum for eta = 0") {
  const auto f = fock_amplitudes({0.0, 0.0}, 5);
  CHECK(f.amplitudes[0] == std::complex<double>(1.0));
  for (std::size_t n = 1; n < f.amplitudes.size(); ++n) CHECK(f.amplitudes[n] == std::complex<double>(0.0));
  CHECK(marginal_distribution({0.0, 0.0}, 5).probabilities[0] == 1.0);
}

TEST_CASE("normalization and monotone decay") {
  const auto f = fock_amplitudes(std::polar(0.5, 1.0), 40);
  CHECK(f.norm_squared() == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t n = 1; n < f.amplitudes.size(); ++n) CHECK(std::abs(f.amplitudes[n]) < std::abs(f.amplitudes[n - 1]));
  CHECK_THROWS(fock_amplitudes(0.5, -1));
}

TEST_CASE("small eta expansion") {
  const std::complex<double> eta = std::polar(0.01, 0.7);
  const auto f = fock_amplitudes(eta, 2);
  CHECK(std::abs(f.amplitudes[0] - (1.0 - 0.5 * std::norm(eta))) < 1e-7);
  CHECK(std::abs(f.amplitudes[1] / eta - 1.0) < 1e-3);
  CHECK(std::abs(f.amplitudes[2] / (eta * eta) - 1.0) < 1e-3);
}

TEST_CASE("marginal at nu = 1") {
  const auto d = marginal_distribution(std::asinh(1.0), 40);
  CHECK(d.nu == doctest::Approx(1.0));
  CHECK(d.probabilities[0] == doctest::Approx(0.5));
  CHECK(d.probabilities[1] == doctest::Approx(0.25));
  const auto approx = marginal_distribution(0.8814, 40);
  CHECK(approx.probabilities[0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("fock amplitudes reproduce thermal statistics") {
  for (double r : {0.1, 0.5, 1.0}) {
    const auto d = marginal_distribution(r, 20);
    const double nu = std::sinh(r) * std::sinh(r);
    for (int n = 0; n <= 20; ++n) {
      // independent closed form
      const double thermal = std::pow(nu, n) / std::pow(nu + 1.0, n + 1);
      CHECK(std::abs(d.probabilities[static_cast<std::size_t>(n)] - thermal) < 1e-12);
    }
    CHECK(d.max_thermal_deviation < 1e-12);
  }
}

TEST_CASE("thermal moments of the marginal") {
  for (double r : {0.3, 0.8}) {
    const int n_max = adaptive_truncation(r);
    const auto d = marginal_distribution(r, n_max);
    const double nu = std::sinh(r) * std::sinh(r);
    CHECK(d.mean() == doctest::Approx(nu).epsilon(1e-9));
    CHECK(d.factorial_moment2() == doctest::Approx(2.0 * d.mean() * d.mean()).epsilon(1e-6));
    const double tail = std::pow(std::tanh(r), 2.0 * (n_max + 1));
    CHECK(tail < 1e-12);
  }
  CHECK(adaptive_truncation(0.0) == 0);
}

TEST_CASE("exact four-photon polarization probabilities") {
  CHECK(twin_state().norm_squared() == Rational(1));
  CHECK(sister_state().norm_squared() == Rational(1));
  CHECK(same_polarization_probability(twin_state()) == Rational(2, 3));
  CHECK(same_polarization_probability(sister_state()) == Rational(1, 2));
  CHECK(uncorrelated_same_polarization_probability() == Rational(1, 2));
  FourPhotonState bad{{SurdAmplitude{Rational(1, 2), 1}, SurdAmplitude{Rational(1, 2), 1}, SurdAmplitude{Rational(1, 2), 1}}};
  CHECK_THROWS(same_polarization_probability(bad));
}

TEST_CASE("basis labels") {
  const auto& b = four_photon_basis();
  CHECK(b[0].label == "|2H,2V>");
  CHECK(b[2].signal[0] != b[2].signal[1]);
}

TEST_CASE("report text") {
  const std::string r = multiphoton_report(0.5);
  CHECK(r.find("twin_same_polarization = 2/3") != std::string::npos);
  CHECK(r.find("sister_same_polarization = 1/2") != std::string::npos);
  CHECK(r.find("P5 = ") != std::string::npos);
}
