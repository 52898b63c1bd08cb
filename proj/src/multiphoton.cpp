#include "hbt/multiphoton.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hbt {

double FockExpansion::norm_squared() const {
  double s = 0.0;
  for (const auto& c : amplitudes) s += std::norm(c);
  return s;
}

FockExpansion fock_amplitudes(std::complex<double> eta, int n_max) {
  if (n_max < 0) throw std::invalid_argument("fock_amplitudes: n_max must be non-negative");
  FockExpansion f;
  f.eta = eta;
  f.amplitudes.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double r = std::abs(eta);
  if (r == 0.0) {
    f.amplitudes[0] = 1.0;
    return f;
  }
  const std::complex<double> ratio = eta / r * std::tanh(r);
  std::complex<double> c = 1.0 / std::cosh(r);
  for (auto& a : f.amplitudes) {
    a = c;
    c *= ratio;
  }
  return f;
}

int adaptive_truncation(double abs_eta, double tail) {
  if (abs_eta == 0.0) return 0;
  const double t2 = std::tanh(abs_eta) * std::tanh(abs_eta);
  // tail(n) = t2^(n+1) < tail
  const double n = std::log(tail) / std::log(t2) - 1.0;
  return std::max(0, static_cast<int>(std::ceil(n)));
}

double MarginalDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < probabilities.size(); ++n) m += static_cast<double>(n) * probabilities[n];
  return m;
}

double MarginalDistribution::factorial_moment2() const {
  double m = 0.0;
  for (std::size_t n = 2; n < probabilities.size(); ++n) {
    m += static_cast<double>(n) * static_cast<double>(n - 1) * probabilities[n];
  }
  return m;
}

MarginalDistribution marginal_distribution(std::complex<double> eta, int n_max) {
  const FockExpansion f = fock_amplitudes(eta, n_max);
  MarginalDistribution d;
  d.nu = std::sinh(std::abs(eta)) * std::sinh(std::abs(eta));
  d.probabilities.resize(f.amplitudes.size());
  for (std::size_t n = 0; n < f.amplitudes.size(); ++n) {
    d.probabilities[n] = std::norm(f.amplitudes[n]);
    const double thermal = thermal_pn({d.nu}, static_cast<int>(n));
    d.max_thermal_deviation = std::max(d.max_thermal_deviation, std::abs(d.probabilities[n] - thermal));
  }
  return d;
}

const std::array<FourPhotonKet, 3>& four_photon_basis() {
  using P = Polarization;
  static const std::array<FourPhotonKet, 3> basis{{
      {{P::H, P::H}, {P::V, P::V}, "|2H,2V>"},
      {{P::V, P::V}, {P::H, P::H}, "|2V,2H>"},
      {{P::H, P::V}, {P::V, P::H}, "|HV,VH>"},
  }};
  return basis;
}

Rational FourPhotonState::norm_squared() const {
  Rational s{0};
  for (const auto& a : amplitudes) s += a.squared();
  return s;
}

FourPhotonState twin_state() {
  // (|2H,2V> + |2V,2H> - |HV,VH>) / sqrt(3), with 1/sqrt(3) = sqrt(3)/3
  return {{SurdAmplitude{Rational(1, 3), 3}, SurdAmplitude{Rational(1, 3), 3}, SurdAmplitude{Rational(-1, 3), 3}}};
}

FourPhotonState sister_state() {
  // (|2H,2V> + |2V,2H> - sqrt(2)|HV,VH>) / 2
  return {{SurdAmplitude{Rational(1, 2), 1}, SurdAmplitude{Rational(1, 2), 1}, SurdAmplitude{Rational(-1, 2), 2}}};
}

Rational same_polarization_probability(const FourPhotonState& state) {
  if (state.norm_squared() != Rational(1)) throw std::invalid_argument("same_polarization_probability: state is not normalized");
  Rational p{0};
  const auto& basis = four_photon_basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].signal[0] == basis[i].signal[1]) p += state.amplitudes[i].squared();
  }
  return p;
}

Rational uncorrelated_same_polarization_probability() {
  Rational p{0};
  for (auto a : {Polarization::H, Polarization::V}) {
    for (auto b : {Polarization::H, Polarization::V}) {
      if (a == b) p += Rational(1, 4);
    }
  }
  return p;
}

std::string multiphoton_report(std::complex<double> eta) {
  const int n_max = std::max(5, adaptive_truncation(std::abs(eta)));
  const MarginalDistribution d = marginal_distribution(eta, n_max);
  std::ostringstream os;
  os << std::setprecision(12);
  os << "eta_re = " << eta.real() << '\n' << "eta_im = " << eta.imag() << '\n';
  os << "n_max = " << n_max << '\n';
  os << "nu = " << d.nu << '\n';
  for (int n = 0; n <= 5; ++n) os << "P" << n << " = " << d.probabilities[static_cast<std::size_t>(n)] << '\n';
  os << "mean_n = " << d.mean() << '\n';
  os << "g2_zero = " << (d.mean() > 0.0 ? d.factorial_moment2() / (d.mean() * d.mean()) : 0.0) << '\n';
  os << "max_thermal_deviation = " << d.max_thermal_deviation << '\n';
  const Rational twin = same_polarization_probability(twin_state());
  const Rational sister = same_polarization_probability(sister_state());
  os << "twin_same_polarization = " << twin.numerator() << '/' << twin.denominator() << '\n';
  os << "sister_same_polarization = " << sister.numerator() << '/' << sister.denominator() << '\n';
  return os.str();
}

}  // namespace hbt
