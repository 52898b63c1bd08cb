#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hbt/correlator.hpp"
#include "hbt/optics.hpp"

using namespace hbt;

namespace {

TagStream to_tags(const PhotonStream& p, std::uint8_t channel, Femtoseconds res) {
  TagStream t;
  t.resolution = res;
  t.duration_ticks = static_cast<std::uint64_t>(p.duration.count() / res.count());
  for (auto a : p.arrivals) t.records.push_back({channel, static_cast<std::uint64_t>(a / res.count())});
  return t;
}

}  // namespace

TEST_CASE("independent streams give a flat plateau at lambda1 lambda2 tau T") {
  const Femtoseconds res{82'200};
  const auto a = to_tags(emit_coherent_stream(from_seconds(2.0), 1e6, 1), 0, res);
  const auto b = to_tags(emit_coherent_stream(from_seconds(2.0), 1e6, 2), 1, res);
  const auto h = cross_correlate(a, b, res, from_ns(50.0));
  CHECK(h.size() == 1217);
  const double expect = h.plateau_expectation();
  const double mean = std::accumulate(h.counts.begin(), h.counts.end(), 0.0) / static_cast<double>(h.size());
  CHECK(mean == doctest::Approx(expect).epsilon(0.01));
  CHECK(expect == doctest::Approx(1e6 * 1e6 * 82.2e-12 * 2.0).epsilon(0.01));
}

TEST_CASE("swapping the channels mirrors the histogram for odd bin widths") {
  const Femtoseconds res{1000};
  const auto a = to_tags(emit_coherent_stream(from_seconds(1e-4), 1e9, 3), 0, res);
  const auto b = to_tags(emit_coherent_stream(from_seconds(1e-4), 1e9, 4), 1, res);
  const auto ab = cross_correlate(a, b, Femtoseconds{3000}, from_ps(300.0));
  const auto ba = cross_correlate(b, a, Femtoseconds{3000}, from_ps(300.0));
  std::vector<std::uint64_t> mirrored(ba.counts.rbegin(), ba.counts.rend());
  CHECK(ab.counts == mirrored);
}

TEST_CASE("software delay removal recenters a delayed copy") {
  const Femtoseconds res{1000};
  const PhotonStream p = emit_coherent_stream(from_seconds(1e-4), 1e8, 5);
  const PhotonStream shifted = delay_stream(p, from_ns(2.0));
  const auto a = to_tags(p, 0, res);
  const auto b = to_tags(shifted, 1, res);
  CorrelateOptions opt;
  opt.b_delay = from_ns(2.0);
  const auto h = cross_correlate(a, b, res, from_ps(50.0), opt);
  CHECK(h.counts[static_cast<std::size_t>(h.half_bins)] == p.size());
  const auto raw = cross_correlate(a, b, res, from_ns(2.5));
  CHECK(raw.counts[static_cast<std::size_t>(raw.half_bins + 2000)] == p.size());
}

TEST_CASE("serial and sharded correlation agree") {
  const Femtoseconds res{82'200};
  const auto a = to_tags(emit_coherent_stream(from_seconds(0.5), 2e6, 6), 0, res);
  const auto b = to_tags(emit_coherent_stream(from_seconds(0.5), 2e6, 7), 1, res);
  CorrelateOptions serial;
  serial.parallel = false;
  CHECK(cross_correlate(a, b, res, from_ns(50.0)).counts == cross_correlate(a, b, res, from_ns(50.0), serial).counts);
}

TEST_CASE("merging segment histograms adds counts, times and events") {
  const std::vector<std::int64_t> a{0, 10, 20}, b{1, 12, 40};
  auto h1 = cross_correlate_ticks(a, b, Femtoseconds{1}, 1.0, Femtoseconds{1}, Femtoseconds{5});
  auto h2 = h1;
  CorrelationHistogram total;
  merge_into(total, h1);
  merge_into(total, h2);
  CHECK(total.total_time_s == 2.0);
  CHECK(total.events_a == 6);
  for (std::size_t k = 0; k < total.size(); ++k) CHECK(total.counts[k] == 2 * h1.counts[k]);
  auto other = cross_correlate_ticks(a, b, Femtoseconds{1}, 1.0, Femtoseconds{1}, Femtoseconds{6});
  CHECK_THROWS(merge_into(total, other));
}

TEST_CASE("geometry errors") {
  TagStream a, b;
  a.resolution = Femtoseconds{10};
  b.resolution = Femtoseconds{20};
  CHECK_THROWS(cross_correlate(a, b, Femtoseconds{20}, Femtoseconds{100}));
  b.resolution = Femtoseconds{10};
  CHECK_THROWS(cross_correlate(a, b, Femtoseconds{15}, Femtoseconds{100}));
}

TEST_CASE("normalization and its preconditions") {
  CorrelationHistogram h;
  h.bin_width = from_ps(10.0);
  h.half_bins = 100;
  h.counts.assign(201, 400);
  h.counts[100] = 800;
  h.total_time_s = 1.0;
  const G2Estimate g = normalize(h, from_ps(200.0), from_ps(1000.0));
  CHECK(g.plateau_mean == 400.0);
  CHECK(g.plateau_bins == 162);
  CHECK(g.g2[100] == 2.0);
  CHECK(g.sigma[100] == doctest::Approx(std::sqrt(800.0) / 400.0));
  CHECK_THROWS(normalize(h, from_ps(2000.0), from_ps(3000.0)));   // empty plateau
  CHECK_THROWS(normalize(h, from_ps(900.0), from_ps(1000.0)));    // fewer than 100 bins
  h.counts.assign(201, 0);
  CHECK_THROWS(normalize(h, from_ps(200.0), from_ps(1000.0)));    // no counts
}

TEST_CASE("peak statistics of a synthetic excess") {
  G2Estimate g;
  g.bin_width_ps = 10.0;
  for (int k = -50; k <= 50; ++k) {
    g.delays_ps.push_back(10.0 * k);
    g.g2.push_back(1.0 + (k == 0 ? 0.5 : (std::abs(k) == 1 ? 0.25 : 0.0)) + (k == 3 ? 0.1 : 0.0));
    g.sigma.push_back(0.01);
  }
  const PeakReport r = peak_stats(g, from_ps(-15.0), from_ps(15.0));
  CHECK(r.bins == 3);
  CHECK(r.height_excess == doctest::Approx(0.5));
  CHECK(r.area_excess_ps == doctest::Approx(10.0));
  CHECK(r.centroid_ps == doctest::Approx(0.0));
  CHECK(r.area_sigma_ps == doctest::Approx(std::sqrt(3.0) * 0.01 * 10.0));
  CHECK(r.significance == doctest::Approx(10.0 / (std::sqrt(3.0) * 0.1)));
  const PeakReport smooth = peak_stats(g, from_ps(-15.0), from_ps(15.0), 3);
  CHECK(smooth.height_excess == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS(peak_stats(g, from_ps(10.0), from_ps(-10.0)));
  CHECK_THROWS(peak_stats(g, from_ps(0.0), from_ps(5000.0)));
}
