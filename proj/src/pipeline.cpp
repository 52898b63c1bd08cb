#include "hbt/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hbt {
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

Femtoseconds segment_length(Femtoseconds total, int segments, int index) {
  const std::int64_t base = total.count() / segments;
  const std::int64_t extra = index == segments - 1 ? total.count() - base * segments : 0;
  return Femtoseconds{base + extra};
}

std::filesystem::path segment_tag_path(const std::filesystem::path& dir, const char* prefix, int index) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s_%05d.hbtt", prefix, index);
  return dir / name;
}

void accumulate(DetectionDiagnostics& total, const DetectionDiagnostics& d) {
  total.photons_in += d.photons_in;
  total.detected_photons += d.detected_photons;
  total.dark_counts += d.dark_counts;
  total.dropped_at_boundary += d.dropped_at_boundary;
  total.lost_to_dead_time += d.lost_to_dead_time;
  total.tags_out += d.tags_out;
  total.saturated = total.saturated || d.saturated;
}

struct SegmentOutput {
  CorrelationHistogram histogram;
  std::array<DetectionDiagnostics, 2> detection;
  ThermalSamplerDiagnostics sampler;
};

// Shared tail of measurement and calibration: delay arm B, detect both arms,
// optionally store tags, correlate with the delay removed.
SegmentOutput detect_and_correlate(const ExperimentConfig& cfg, PhotonStream a, PhotonStream b,
                                   Femtoseconds duration, std::uint64_t seed,
                                   const std::optional<std::filesystem::path>& tag_path) {
  SegmentOutput out;
  const Femtoseconds delay = from_ns(cfg.optics.delay_ns);
  b = stage("optics", [&] { return delay_stream(b, delay); });
  const TagStream ta = stage("detection", [&] {
    return detect(a, cfg.detectors[0], duration, derive_seed(seed, StreamTag::Efficiency, 0), &out.detection[0]);
  });
  const TagStream tb = stage("detection", [&] {
    return detect(b, cfg.detectors[1], b.duration, derive_seed(seed, StreamTag::Efficiency, 1), &out.detection[1]);
  });
  if (tag_path) stage("tag output", [&] { write_tags(merge_tags(ta, tb), *tag_path); });
  out.histogram = stage("correlation", [&] {
    const auto ticks_a = ta.ticks();
    const auto ticks_b = tb.ticks();
    CorrelateOptions opt;
    opt.b_delay = delay;
    return cross_correlate_ticks(ticks_a, ticks_b, cfg.detectors[0].tag_resolution, to_seconds(duration),
                                 from_ps(cfg.correlation.bin_width_ps), from_ns(cfg.correlation.max_lag_ns), opt);
  });
  return out;
}

MeasurementResult run_segments(const ExperimentConfig& cfg, int segments, Femtoseconds total,
                               const std::optional<std::filesystem::path>& tag_dir, const char* prefix,
                               const std::function<SegmentOutput(int, Femtoseconds, const std::optional<std::filesystem::path>&)>& one,
                               const ProgressFn& progress) {
  (void)cfg;
  if (tag_dir) std::filesystem::create_directories(*tag_dir);
  MeasurementResult result;
  for (int s = 0; s < segments; ++s) {
    std::optional<std::filesystem::path> tag_path;
    if (tag_dir) {
      tag_path = segment_tag_path(*tag_dir, prefix, s);
      result.tag_files.push_back(*tag_path);
    }
    SegmentOutput seg = one(s, segment_length(total, segments, s), tag_path);
    merge_into(result.histogram, seg.histogram);
    for (std::size_t i = 0; i < 2; ++i) accumulate(result.detection[i], seg.detection[i]);
    result.sampler.candidates += seg.sampler.candidates;
    result.sampler.field_evaluations += seg.sampler.field_evaluations;
    result.sampler.clipped += seg.sampler.clipped;
    if (progress) progress(std::string(prefix) + " segment " + std::to_string(s + 1) + "/" + std::to_string(segments));
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const double seconds = to_seconds(total);
    result.detection[i].output_rate_hz = static_cast<double>(result.detection[i].tags_out) / seconds;
  }
  return result;
}

}  // namespace

MeasurementResult simulate_measurement(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& tag_dir,
                                       const ProgressFn& progress) {
  cfg.validate();
  auto one = [&](int s, Femtoseconds duration, const std::optional<std::filesystem::path>& tag_path) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, StreamTag::Segment, static_cast<std::uint64_t>(s));
    ThermalSamplerDiagnostics sampler;
    PhotonStream photons = stage("source", [&] {
      if (cfg.source.kind == SourceKind::Coherent) {
        return emit_coherent_stream(duration, cfg.source.rate_hz, derive_seed(seed, StreamTag::Emission));
      }
      ThermalSamplerOptions opt;
      opt.intensity_cap = cfg.source.intensity_cap;
      return sample_thermal_photons(cfg.source.spectrum, cfg.source.rate_hz, duration,
                                    derive_seed(seed, StreamTag::FieldNoise), opt, &sampler);
    });
    auto [a, b] = stage("optics", [&] {
      auto split = beam_split(photons, cfg.optics.transmittance, derive_seed(seed, StreamTag::BeamSplit));
      split.first = attenuate(split.first, cfg.optics.efficiency_a, derive_seed(seed, StreamTag::Attenuation, 0));
      split.second = attenuate(split.second, cfg.optics.efficiency_b, derive_seed(seed, StreamTag::Attenuation, 1));
      return split;
    });
    photons = PhotonStream{};
    SegmentOutput out = detect_and_correlate(cfg, std::move(a), std::move(b), duration, seed, tag_path);
    out.sampler = sampler;
    return out;
  };
  return run_segments(cfg, cfg.run.segments, from_seconds(cfg.run.duration_s), tag_dir, "measurement", one, progress);
}

MeasurementResult simulate_calibration(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& tag_dir) {
  cfg.validate();
  auto one = [&](int s, Femtoseconds duration, const std::optional<std::filesystem::path>& tag_path) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, StreamTag::PairSource, static_cast<std::uint64_t>(s));
    auto [a, b] = stage("pair source", [&] {
      return simulate_pair_source(cfg.calibration.pair_rate_hz, from_ps(cfg.calibration.pair_spread_ps), duration,
                                  derive_seed(seed, StreamTag::Emission));
    });
    return detect_and_correlate(cfg, std::move(a), std::move(b), duration, seed, tag_path);
  };
  return run_segments(cfg, cfg.calibration.segments, from_seconds(cfg.calibration.duration_s), tag_dir, "calibration",
                      one, {});
}

G1AreaResult g1_squared_area(const ExperimentConfig& cfg) {
  G1AreaResult r;
  switch (cfg.prediction.g1sq_source) {
    case G1AreaSource::Analytic:
      r.area_ps = analytic_g1_squared_area(cfg.source.spectrum);
      break;
    case G1AreaSource::Value:
      r.area_ps = cfg.prediction.g1sq_area_ps;
      break;
    case G1AreaSource::Scan: {
      r.interferogram = stage("interferogram", [&] {
        return michelson_scan(cfg.source.spectrum, cfg.scan, derive_seed(cfg.master_seed, StreamTag::Scan));
      });
      r.envelope = stage("envelope", [&] {
        EnvelopeOptions opt;
        opt.background_rate_hz = cfg.scan.background_rate_hz;
        opt.window_fringes = cfg.prediction.window_fringes;
        opt.center_wavelength_nm = cfg.source.spectrum.center_wavelength_nm;
        return extract_envelope(*r.interferogram, opt);
      });
      r.area_ps = stage("envelope", [&] { return squared_envelope_area(*r.envelope); });
      const auto& v = r.envelope->values;
      if (std::max(v.front(), v.back()) > 0.05) {
        r.warnings.push_back("scan range does not cover the full coherence envelope");
      }
      if (r.envelope->clipped_windows > 0) {
        r.warnings.push_back(std::to_string(r.envelope->clipped_windows) +
                             " scan windows clipped to zero after background subtraction");
      }
      break;
    }
  }
  return r;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, const PipelineOptions& options) {
  stage("config", [&] { cfg.validate(); });
  std::optional<std::filesystem::path> tag_dir;
  if (options.out_dir && cfg.run.write_tags) tag_dir = *options.out_dir / "tags";
  PipelineResult r;
  try {
    r.measurement = simulate_measurement(cfg, tag_dir, options.progress);
    r.calibration = simulate_calibration(cfg, std::nullopt);
    const Femtoseconds plo = from_ns(cfg.correlation.plateau_lo_ns);
    const Femtoseconds phi = from_ns(cfg.correlation.plateau_hi_ns);
    r.g2 = stage("normalization", [&] { return normalize(r.measurement.histogram, plo, phi); });
    r.jitter = stage("jitter calibration", [&] { return normalize_jitter(r.calibration.histogram, plo, phi); });
    r.g1sq = g1_squared_area(cfg);
    r.prediction = stage("prediction", [&] {
      return predict_smeared_peak(r.jitter, r.g1sq.area_ps, cfg.prediction.shift_ps,
                                  to_ps(cfg.detectors[0].tag_resolution));
    });
    r.comparison = stage("comparison", [&] {
      return compare_with_prediction(r.g2, r.prediction, from_ps(cfg.correlation.peak_lo_ps),
                                     from_ps(cfg.correlation.peak_hi_ps));
    });
    r.warnings = r.g1sq.warnings;
    r.warnings.insert(r.warnings.end(), r.prediction.warnings.begin(), r.prediction.warnings.end());
    for (std::size_t i = 0; i < 2; ++i) {
      if (r.measurement.detection[i].saturated) {
        r.warnings.push_back("detector " + std::to_string(i) + " exceeded its saturation rate");
      }
    }
    if (options.out_dir) write_pipeline_artifacts(r, cfg, *options.out_dir);
  } catch (...) {
    if (options.out_dir) {
      std::error_code ec;
      for (const auto& p : r.measurement.tag_files) std::filesystem::remove(p, ec);
      if (tag_dir) std::filesystem::remove_all(*tag_dir, ec);
    }
    throw;
  }
  return r;
}

KeyValueReport comparison_summary(const ComparisonReport& c, const PredictedPeak& p, const G2Estimate& g2) {
  KeyValueReport rep;
  rep.set("plateau_mean_counts", g2.plateau_mean);
  rep.set_int("plateau_bins", static_cast<long long>(g2.plateau_bins));
  rep.set("predicted_height", p.height);
  rep.set("predicted_area_ps", p.area_ps);
  rep.set("predicted_window_area_ps", c.predicted_window_area_ps);
  rep.set("shift_ps", p.shift_ps);
  rep.set("measured_height_max_bin", c.observed.height_excess);
  rep.set("measured_height_fit", c.fitted_height);
  rep.set("fitted_scale", c.fitted_scale);
  rep.set("fitted_scale_sigma", c.fitted_scale_sigma);
  rep.set("measured_area_ps", c.observed.area_excess_ps);
  rep.set("measured_area_sigma_ps", c.observed.area_sigma_ps);
  rep.set("centroid_ps", c.observed.centroid_ps);
  rep.set("significance", c.observed.significance);
  rep.set("peak_bins", static_cast<double>(c.observed.bins));
  rep.set("height_ratio_max_bin", c.height_ratio);
  rep.set("area_ratio", c.area_ratio);
  rep.set("chi2", c.chi2);
  rep.set_int("dof", static_cast<long long>(c.dof));
  rep.set("model_relative_error", c.model_relative_error);
  return rep;
}

KeyValueReport pipeline_summary(const PipelineResult& r, const ExperimentConfig& cfg) {
  KeyValueReport rep;
  rep.set("master_seed", std::to_string(cfg.master_seed));
  rep.set("source", cfg.source.kind == SourceKind::Thermal ? "thermal" : "coherent");
  rep.set("spectrum", std::string(to_string(cfg.source.spectrum.shape)));
  rep.set("coherence_time_ps", cfg.source.spectrum.coherence_time_ps);
  rep.set("duration_s", cfg.run.duration_s);
  rep.set_int("segments", cfg.run.segments);
  rep.set_int("events_a", static_cast<long long>(r.measurement.histogram.events_a));
  rep.set_int("events_b", static_cast<long long>(r.measurement.histogram.events_b));
  rep.set("rate_a_hz", r.measurement.detection[0].output_rate_hz);
  rep.set("rate_b_hz", r.measurement.detection[1].output_rate_hz);
  rep.set_int("lost_to_dead_time_a", static_cast<long long>(r.measurement.detection[0].lost_to_dead_time));
  rep.set_int("lost_to_dead_time_b", static_cast<long long>(r.measurement.detection[1].lost_to_dead_time));
  rep.set_int("sampler_candidates", static_cast<long long>(r.measurement.sampler.candidates));
  rep.set_int("sampler_clipped", static_cast<long long>(r.measurement.sampler.clipped));
  rep.set("plateau_expectation_counts", r.measurement.histogram.plateau_expectation());
  rep.set("g1sq_area_ps", r.g1sq.area_ps);
  rep.set("jitter_area_ps", r.jitter.area_ps);
  const KeyValueReport comparison = comparison_summary(r.comparison, r.prediction, r.g2);
  for (const auto& [k, v] : comparison.entries()) rep.set(k, v);
  for (std::size_t i = 0; i < r.warnings.size(); ++i) rep.set("warning_" + std::to_string(i), r.warnings[i]);
  return rep;
}

void write_pipeline_artifacts(const PipelineResult& r, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto track = [&](const char* name) {
    written.push_back(dir / name);
    return written.back();
  };
  try {
    {
      std::ofstream f(track("config.json"), std::ios::binary);
      f << config_to_json(cfg);
    }
    write_histogram_csv(r.measurement.histogram, track("histogram.csv"));
    write_g2_csv(r.g2, track("g2.csv"));
    write_histogram_csv(r.calibration.histogram, track("calibration_histogram.csv"));
    write_jitter_curve_csv(r.jitter, track("jitter_curve.csv"));
    write_prediction_csv(r.prediction, track("prediction.csv"));
    write_residuals_csv(r.comparison, track("residuals.csv"));
    if (r.g1sq.interferogram) write_interferogram_csv(*r.g1sq.interferogram, track("interferogram.csv"));
    if (r.g1sq.envelope) write_envelope_csv(*r.g1sq.envelope, track("envelope.csv"));
    pipeline_summary(r, cfg).write(track("comparison.txt"));
  } catch (const std::exception& e) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw PipelineError("artifact output", e.what());
  }
}

}  // namespace hbt
