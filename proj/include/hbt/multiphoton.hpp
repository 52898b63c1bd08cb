#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "hbt/field_model.hpp"

namespace hbt {

/// Two-mode squeezed vacuum in the pair-number basis: c_n for n = 0..n_max.
struct FockExpansion {
  std::complex<double> eta;
  std::vector<std::complex<double>> amplitudes;

  double norm_squared() const;
};

/// c_n = sech|eta| (eta/|eta| tanh|eta|)^n; eta = 0 gives the vacuum.
FockExpansion fock_amplitudes(std::complex<double> eta, int n_max);

/// Smallest n_max whose neglected tail sum_{n > n_max} |c_n|^2 = tanh^(2(n_max+1))|eta| is below `tail`.
int adaptive_truncation(double abs_eta, double tail = 1e-12);

/// Photon-number distribution of one arm after tracing out the other.
struct MarginalDistribution {
  double nu = 0.0;                     // sinh^2|eta|
  std::vector<double> probabilities;   // |c_n|^2
  double max_thermal_deviation = 0.0;  // max_n |P_n - thermal_pn(nu, n)|

  double mean() const;
  double factorial_moment2() const;    // <n(n-1)>
};

MarginalDistribution marginal_distribution(std::complex<double> eta, int n_max);

// Exact four-photon polarization states ----------------------------------------

using Rational = boost::rational<std::int64_t>;

/// coefficient * sqrt(radicand), radicand a positive integer.
struct SurdAmplitude {
  Rational coefficient{0};
  std::int64_t radicand = 1;

  Rational squared() const { return coefficient * coefficient * radicand; }
};

enum class Polarization : std::uint8_t { H, V };

/// One signal(x)idler outcome: polarizations of the two signal and the two idler photons.
struct FourPhotonKet {
  std::array<Polarization, 2> signal;
  std::array<Polarization, 2> idler;
  std::string label;
};

/// Basis order: |2H,2V>, |2V,2H>, |HV,VH>.
const std::array<FourPhotonKet, 3>& four_photon_basis();

struct FourPhotonState {
  std::array<SurdAmplitude, 3> amplitudes;

  Rational norm_squared() const;
};

/// Two pairs in one temporal mode.
FourPhotonState twin_state();
/// Two pairs in distinguishable temporal modes.
FourPhotonState sister_state();

/// Probability that both signal photons carry the same polarization, by
/// enumerating the basis. Throws if the state is not exactly normalized.
Rational same_polarization_probability(const FourPhotonState& state);

/// Baseline for two independent, unpolarized signal photons (enumerated).
Rational uncorrelated_same_polarization_probability();

/// Text report: eta, nu, P_0..P_5, twin/sister probabilities.
std::string multiphoton_report(std::complex<double> eta);

}  // namespace hbt
