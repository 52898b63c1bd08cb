#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hbt/detection.hpp"

using namespace hbt;

namespace {

DetectorConfig ideal() {
  DetectorConfig d;
  d.quantum_efficiency = 1.0;
  d.dark_rate_hz = 0.0;
  d.jitter = GaussianJitter{0.0};
  d.dead_time = Femtoseconds{0};
  d.tag_resolution = Femtoseconds{1};
  d.saturation_rate_hz = 1e12;
  return d;
}

}  // namespace

TEST_CASE("ideal detector passes every photon unchanged") {
  const PhotonStream in = emit_coherent_stream(from_seconds(1e-3), 1e7, 1);
  DetectionDiagnostics diag;
  const TagStream t = detect(in, ideal(), in.duration, 2, &diag);
  REQUIRE(t.records.size() == in.size());
  std::size_t moved = 0;
  for (std::size_t i = 0; i < in.size(); ++i) moved += static_cast<std::int64_t>(t.records[i].tick) != in.arrivals[i];
  CHECK(moved == 0);
  CHECK(diag.lost_to_dead_time == 0);
  CHECK(t.is_sorted());
}

TEST_CASE("quantum efficiency and dark counts") {
  const PhotonStream in = emit_coherent_stream(from_seconds(0.1), 1e6, 3);
  DetectorConfig d = ideal();
  d.quantum_efficiency = 0.5;
  DetectionDiagnostics diag;
  detect(in, d, in.duration, 4, &diag);
  CHECK(static_cast<double>(diag.detected_photons) == doctest::Approx(5e4).epsilon(0.02));

  PhotonStream dark_only;
  dark_only.duration = from_seconds(10.0);
  d.dark_rate_hz = 500.0;
  const TagStream t = detect(dark_only, d, dark_only.duration, 5, &diag);
  CHECK(static_cast<double>(t.records.size()) == doctest::Approx(5000.0).epsilon(0.05));
}

TEST_CASE("non-paralyzable dead time follows n / (1 + n tau)") {
  const PhotonStream in = emit_coherent_stream(from_seconds(0.2), 5e6, 6);
  DetectorConfig d = ideal();
  d.dead_time = from_ns(50.0);
  d.tag_resolution = Femtoseconds{82'200};
  DetectionDiagnostics diag;
  const TagStream t = detect(in, d, in.duration, 7, &diag);
  const double expected = 5e6 / (1.0 + 5e6 * 50e-9);
  CHECK(diag.output_rate_hz == doctest::Approx(expected).epsilon(0.01));
  const auto ticks = t.ticks();
  std::int64_t min_gap = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 1; i < ticks.size(); ++i) min_gap = std::min(min_gap, ticks[i] - ticks[i - 1]);
  CHECK(min_gap >= 608);
  const auto ia = autocorrelation_deadtime_check(t, from_ns(500.0), Femtoseconds{82'200});
  CHECK(ia.first_occupied() >= Femtoseconds{608 * 82'200});
  CHECK(ia.first_occupied() <= from_ns(51.0));
}

TEST_CASE("gaussian jitter has the configured width") {
  PhotonStream in;
  in.duration = from_seconds(1.0);
  for (std::int64_t i = 0; i < 200'000; ++i) in.arrivals.push_back(1'000'000'000 + i * 4'000'000);
  DetectorConfig d = ideal();
  d.jitter = GaussianJitter{640.0};
  const TagStream t = detect(in, d, in.duration, 8);
  REQUIRE(t.records.size() == in.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double dt = static_cast<double>(static_cast<std::int64_t>(t.records[i].tick) - in.arrivals[i]) * 1e-3;
    s1 += dt;
    s2 += dt * dt;
  }
  const double n = static_cast<double>(in.size());
  CHECK(std::abs(s1 / n) < 2.0);
  CHECK(std::sqrt(s2 / n - (s1 / n) * (s1 / n)) == doctest::Approx(fwhm_to_sigma(640.0)).epsilon(0.01));
}

TEST_CASE("empirical jitter samples the tabulated density") {
  PhotonStream in;
  in.duration = from_seconds(1.0);
  for (std::int64_t i = 0; i < 100'000; ++i) in.arrivals.push_back(1'000'000'000 + i * 4'000'000);
  DetectorConfig d = ideal();
  d.jitter = EmpiricalJitter{{-100.0, 0.0, 300.0}, {1.0, 3.0}};
  const TagStream t = detect(in, d, in.duration, 9);
  std::size_t negative = 0, outside = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto dt = static_cast<std::int64_t>(t.records[i].tick) - in.arrivals[i];
    if (dt < -100'000 || dt > 300'000) ++outside;
    if (dt < 0) ++negative;
  }
  CHECK(outside == 0);
  // weights are bin probabilities: 1 vs 3
  CHECK(static_cast<double>(negative) / static_cast<double>(in.size()) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("quantization floors to tag units and boundary events are dropped") {
  PhotonStream in;
  in.duration = Femtoseconds{1'000'000};
  in.arrivals = {0, 82'199, 82'200, 999'999};
  DetectorConfig d = ideal();
  d.tag_resolution = Femtoseconds{82'200};
  const TagStream t = detect(in, d, Femtoseconds{900'000}, 1);
  REQUIRE(t.records.size() == 3);
  CHECK(t.records[0].tick == 0);
  CHECK(t.records[1].tick == 0);
  CHECK(t.records[2].tick == 1);
  CHECK(t.duration_ticks == 11);
}

TEST_CASE("saturation flag") {
  const PhotonStream in = emit_coherent_stream(from_seconds(0.01), 3e6, 2);
  DetectorConfig d = ideal();
  d.saturation_rate_hz = 1e6;
  DetectionDiagnostics diag;
  detect(in, d, in.duration, 3, &diag);
  CHECK(diag.saturated);
}

TEST_CASE("detector validation") {
  DetectorConfig d;
  CHECK_NOTHROW(d.validate());
  d.quantum_efficiency = 1.5;
  CHECK_THROWS(d.validate());
  d = {};
  d.tag_resolution = Femtoseconds{0};
  CHECK_THROWS(d.validate());
  d = {};
  d.jitter = EmpiricalJitter{{0.0, 1.0}, {1.0, 2.0}};
  CHECK_THROWS(d.validate());
}

TEST_CASE("merge_tags interleaves channels in tick order") {
  TagStream a, b;
  a.resolution = b.resolution = Femtoseconds{10};
  a.records = {{0, 1}, {0, 5}};
  b.records = {{1, 1}, {1, 3}};
  a.duration_ticks = 6;
  b.duration_ticks = 8;
  const TagStream m = merge_tags(a, b);
  CHECK(m.records == std::vector<TagRecord>{{0, 1}, {1, 1}, {1, 3}, {0, 5}});
  CHECK(m.duration_ticks == 8);
  CHECK(m.channel_ticks(1) == std::vector<std::int64_t>{1, 3});
  b.resolution = Femtoseconds{20};
  CHECK_THROWS(merge_tags(a, b));
}
