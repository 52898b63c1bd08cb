#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ratio>

namespace hbt {

/// Simulation clock. Every timestamp and duration in the event pipeline is an
/// integer number of femtoseconds; a signed 64-bit count covers ~2.56 h.
using Femtoseconds = std::chrono::duration<std::int64_t, std::femto>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kFemtoPerPico = 1e3;
inline constexpr double kFemtoPerSecond = 1e15;

constexpr double to_ps(Femtoseconds t) { return static_cast<double>(t.count()) / kFemtoPerPico; }
constexpr double to_seconds(Femtoseconds t) { return static_cast<double>(t.count()) / kFemtoPerSecond; }

inline Femtoseconds from_ps(double ps) { return Femtoseconds{std::llround(ps * kFemtoPerPico)}; }
inline Femtoseconds from_ns(double ns) { return Femtoseconds{std::llround(ns * 1e6)}; }
inline Femtoseconds from_seconds(double s) { return Femtoseconds{std::llround(s * kFemtoPerSecond)}; }

/// Convert FWHM of a Gaussian to its standard deviation.
inline double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

}  // namespace hbt
