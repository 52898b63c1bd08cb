// hbtsim: intensity-interferometry simulator and analysis tool.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "hbt/bunching_model.hpp"
#include "hbt/config.hpp"
#include "hbt/csv_io.hpp"
#include "hbt/multiphoton.hpp"
#include "hbt/pipeline.hpp"
#include "hbt/selftest.hpp"

namespace fs = std::filesystem;
using namespace hbt;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

const char* kFooter = R"(Output files (CSV with leading "# key=value" metadata lines):
  histogram.csv, calibration_histogram.csv   delay_ps,counts
  g2.csv                                     delay_ps,g2,sigma
  jitter_curve.csv                           delay_ps,value      (unit peak)
  prediction.csv                             delay_ps,excess,g2
  residuals.csv                              delay_ps,residual_sigma
  interferogram.csv                          position_mm,counts
  envelope.csv                               delay_ps,g1
  comparison.txt, *.txt                      key = value report
  tags/*.hbtt                                binary tag files (channel 0 = arm A, 1 = arm B)
Exit codes: 0 success, 1 usage or config error, 2 runtime or data error.)";

struct Common {
  std::string config_path;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<int> segments;
  std::optional<int> threads;
  std::string out = "hbt_out";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--preset", c.preset, "Base parameters when no config is given")
      ->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--seed", c.seed, "Override master_seed");
  app->add_option("--segments", c.segments, "Override run.segments")->check(CLI::PositiveNumber);
  app->add_option("--threads", c.threads, "OpenMP thread count (advisory)")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output directory");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    cfg = load_config(c.config_path);
  } else {
    cfg = c.preset == "paper" ? ExperimentConfig::paper() : ExperimentConfig::desk();
  }
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.segments) cfg.run.segments = *c.segments;
  if (c.threads) omp_set_num_threads(*c.threads);
  cfg.validate();
  return cfg;
}

void print_file(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

int cmd_simulate(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  PipelineOptions opt;
  opt.out_dir = fs::path(c.out);
  opt.progress = [](const std::string& msg) { std::cerr << msg << '\r' << std::flush; };
  const PipelineResult r = run_pipeline(cfg, opt);
  std::cerr << '\n';
  std::cout << pipeline_summary(r, cfg).text();
  print_file(fs::path(c.out) / "comparison.txt");
  return 0;
}

int cmd_pairsource(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  std::optional<fs::path> tags;
  if (cfg.run.write_tags) tags = dir / "tags";
  const MeasurementResult m = simulate_calibration(cfg, tags);
  const JitterCurve j =
      normalize_jitter(m.histogram, from_ns(cfg.correlation.plateau_lo_ns), from_ns(cfg.correlation.plateau_hi_ns));
  write_histogram_csv(m.histogram, dir / "calibration_histogram.csv");
  write_jitter_curve_csv(j, dir / "jitter_curve.csv");
  KeyValueReport rep;
  rep.set("jitter_area_ps", j.area_ps);
  rep.set("jitter_fwhm_ps", curve_fwhm(j.delays_ps, j.values));
  rep.set_int("events_a", static_cast<long long>(m.histogram.events_a));
  rep.set_int("events_b", static_cast<long long>(m.histogram.events_b));
  rep.write(dir / "jitter.txt");
  std::cout << rep.text();
  return 0;
}

int cmd_interferogram(const Common& c, int average) {
  ExperimentConfig cfg = resolve(c);
  cfg.prediction.g1sq_source = G1AreaSource::Scan;
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const G1AreaResult g = g1_squared_area(cfg);
  write_interferogram_csv(*g.interferogram, dir / "interferogram.csv", average);
  write_envelope_csv(*g.envelope, dir / "envelope.csv");
  KeyValueReport rep;
  rep.set("vmax_raw", g.envelope->vmax_raw);
  rep.set("envelope_fwhm_ps", curve_fwhm(g.envelope->delays_ps, g.envelope->values));
  rep.set("g1sq_area_ps", g.area_ps);
  rep.set("analytic_g1sq_area_ps", analytic_g1_squared_area(cfg.source.spectrum));
  rep.set_int("windows", static_cast<long long>(g.interferogram->counts.size()));
  for (std::size_t i = 0; i < g.warnings.size(); ++i) rep.set("warning_" + std::to_string(i), g.warnings[i]);
  rep.write(dir / "envelope.txt");
  std::cout << rep.text();
  return 0;
}

int cmd_correlate(const Common& c, const std::vector<std::string>& files, std::optional<double> bin_ps,
                  std::optional<double> max_lag_ns, std::optional<double> delay_ns) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  CorrelationHistogram total;
  CorrelateOptions opt;
  opt.b_delay = from_ns(delay_ns.value_or(cfg.optics.delay_ns));
  for (const auto& f : files) {
    const TagStream t = read_tags(f);
    const auto a = t.channel_ticks(0);
    const auto b = t.channel_ticks(1);
    const auto h = cross_correlate_ticks(a, b, t.resolution, t.duration_seconds(),
                                         from_ps(bin_ps.value_or(cfg.correlation.bin_width_ps)),
                                         from_ns(max_lag_ns.value_or(cfg.correlation.max_lag_ns)), opt);
    merge_into(total, h);
  }
  write_histogram_csv(total, dir / "histogram.csv");
  const G2Estimate g2 =
      normalize(total, from_ns(cfg.correlation.plateau_lo_ns), from_ns(cfg.correlation.plateau_hi_ns));
  write_g2_csv(g2, dir / "g2.csv");
  const PeakReport p = peak_stats(g2, from_ps(cfg.correlation.peak_lo_ps), from_ps(cfg.correlation.peak_hi_ps));
  KeyValueReport rep;
  rep.set_int("events_a", static_cast<long long>(total.events_a));
  rep.set_int("events_b", static_cast<long long>(total.events_b));
  rep.set("plateau_mean_counts", g2.plateau_mean);
  rep.set("plateau_expectation_counts", total.plateau_expectation());
  rep.set("peak_height", p.height_excess);
  rep.set("peak_area_ps", p.area_excess_ps);
  rep.set("peak_area_sigma_ps", p.area_sigma_ps);
  rep.set("centroid_ps", p.centroid_ps);
  rep.set("significance", p.significance);
  rep.write(dir / "correlation.txt");
  std::cout << rep.text();
  return 0;
}

// Unit-peak Gaussian profile with the requested area on a fine grid.
JitterCurve gaussian_jitter_with_area(double area_ps, double bin_ps) {
  const double fwhm = area_ps / std::sqrt(std::numbers::pi / (4.0 * std::log(2.0)));
  const double sigma = fwhm_to_sigma(fwhm);
  JitterCurve j;
  j.bin_width_ps = bin_ps;
  const int half = static_cast<int>(std::ceil(8.0 * sigma / bin_ps));
  for (int k = -half; k <= half; ++k) {
    const double d = k * bin_ps;
    j.delays_ps.push_back(d);
    j.values.push_back(std::exp(-0.5 * d * d / (sigma * sigma)));
  }
  j.area_ps = area_ps;
  return j;
}

int cmd_predict(const Common& c, const std::string& jitter_csv, std::optional<double> jitter_area,
                std::optional<double> g1sq_area, std::optional<double> shift, std::optional<double> plateau_counts) {
  ExperimentConfig cfg = resolve(c);
  if (g1sq_area) {
    cfg.prediction.g1sq_source = G1AreaSource::Value;
    cfg.prediction.g1sq_area_ps = *g1sq_area;
  }
  if (shift) cfg.prediction.shift_ps = *shift;
  cfg.validate();
  const fs::path dir(c.out);
  fs::create_directories(dir);
  JitterCurve j;
  if (!jitter_csv.empty()) {
    j = normalize_jitter(read_histogram_csv(jitter_csv), from_ns(cfg.correlation.plateau_lo_ns),
                         from_ns(cfg.correlation.plateau_hi_ns));
  } else if (jitter_area) {
    j = gaussian_jitter_with_area(*jitter_area, cfg.correlation.bin_width_ps);
  } else {
    throw CLI::ValidationError("predict", "either --jitter or --jitter-area is required");
  }
  const G1AreaResult g = g1_squared_area(cfg);
  const PredictedPeak p = predict_smeared_peak(j, g.area_ps, cfg.prediction.shift_ps, to_ps(cfg.detectors[0].tag_resolution));
  write_prediction_csv(p, dir / "prediction.csv");
  KeyValueReport rep;
  rep.set("g1sq_area_ps", g.area_ps);
  rep.set("jitter_area_ps", j.area_ps);
  rep.set("predicted_height", p.height);
  rep.set("predicted_area_ps", p.area_ps);
  rep.set("shift_ps", p.shift_ps);
  rep.set("model_relative_error", prediction_relative_error());
  if (plateau_counts) {
    rep.set("plateau_counts_per_bin", *plateau_counts);
    rep.set("significance_sigma", predicted_significance(p.height, *plateau_counts));
  }
  for (std::size_t i = 0; i < p.warnings.size(); ++i) rep.set("warning_" + std::to_string(i), p.warnings[i]);
  rep.write(dir / "prediction.txt");
  std::cout << rep.text();
  return 0;
}

int cmd_compare(const Common& c, const std::string& g2_csv, const std::string& prediction_csv) {
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(c.out);
  fs::create_directories(dir);
  const G2Estimate g2 = read_g2_csv(g2_csv);
  const PredictedPeak p = read_prediction_csv(prediction_csv);
  const ComparisonReport r =
      compare_with_prediction(g2, p, from_ps(cfg.correlation.peak_lo_ps), from_ps(cfg.correlation.peak_hi_ps));
  const KeyValueReport rep = comparison_summary(r, p, g2);
  rep.write(dir / "comparison.txt");
  write_residuals_csv(r, dir / "residuals.csv");
  std::cout << rep.text();
  return 0;
}

int cmd_report(const Common& c, bool defaults, std::optional<double> eta, double eta_phase) {
  if (defaults) {
    std::cout << config_to_json(resolve(c));
    return 0;
  }
  if (eta) {
    std::cout << multiphoton_report(std::polar(*eta, eta_phase));
    return 0;
  }
  throw CLI::ValidationError("report", "use --defaults or --eta");
}

int cmd_selftest() {
  int failed = 0;
  for (const auto& check : run_selftest()) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << " (" << check.detail << ")\n";
    if (!check.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return failed == 0 ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hbtsim: thermal-light intensity interferometry simulator"};
  app.footer(kFooter);
  app.require_subcommand(1);
  Common common;

  auto* simulate = app.add_subcommand("simulate", "Full pipeline: measurement, calibration, prediction, comparison");
  add_common(simulate, common);

  auto* pairsource = app.add_subcommand("pairsource", "Jitter calibration with a photon-pair source");
  add_common(pairsource, common);

  auto* interferogram = app.add_subcommand("interferogram", "Michelson scan and |g1| envelope");
  add_common(interferogram, common);
  int average = 1;
  interferogram->add_option("--average", average, "Display averaging of consecutive windows in interferogram.csv")
      ->check(CLI::PositiveNumber);

  auto* correlate = app.add_subcommand("correlate", "Cross-correlate channels 0 and 1 of tag files");
  add_common(correlate, common);
  std::vector<std::string> tag_files;
  std::optional<double> bin_ps, max_lag_ns, delay_ns;
  correlate->add_option("tags", tag_files, "Tag files (.hbtt)")->required()->check(CLI::ExistingFile);
  correlate->add_option("--bin-ps", bin_ps, "Bin width in ps");
  correlate->add_option("--max-lag-ns", max_lag_ns, "Largest |delay| in ns");
  correlate->add_option("--delay-ns", delay_ns, "Delay line on channel 1 to remove, in ns");

  auto* predict = app.add_subcommand("predict", "Smeared-peak prediction from jitter and |g1|^2 areas");
  add_common(predict, common);
  std::string jitter_csv;
  std::optional<double> jitter_area, g1sq_area, shift, plateau_counts;
  predict->add_option("--jitter", jitter_csv, "Calibration histogram CSV")->check(CLI::ExistingFile);
  predict->add_option("--jitter-area", jitter_area, "Jitter area in ps (Gaussian shape assumed)")
      ->check(CLI::PositiveNumber);
  predict->add_option("--g1sq-area", g1sq_area, "|g1|^2 area in ps (default: from config)")->check(CLI::PositiveNumber);
  predict->add_option("--shift-ps", shift, "Lateral shift of the predicted peak");
  predict->add_option("--plateau-counts", plateau_counts, "Plateau counts per bin for the significance estimate")
      ->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Compare a measured g2 with a prediction");
  add_common(compare, common);
  std::string g2_csv, prediction_csv;
  compare->add_option("--g2", g2_csv, "g2.csv")->required()->check(CLI::ExistingFile);
  compare->add_option("--prediction", prediction_csv, "prediction.csv")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Print defaults or the multiphoton report");
  add_common(report, common);
  bool defaults = false;
  std::optional<double> eta;
  double eta_phase = 0.0;
  report->add_flag("--defaults", defaults, "Print the resolved configuration as JSON");
  report->add_option("--eta", eta, "|eta| for the multiphoton report")->check(CLI::NonNegativeNumber);
  report->add_option("--eta-phase", eta_phase, "Phase of eta in radians");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*pairsource) return cmd_pairsource(common);
    if (*interferogram) return cmd_interferogram(common, average);
    if (*correlate) return cmd_correlate(common, tag_files, bin_ps, max_lag_ns, delay_ns);
    if (*predict) return cmd_predict(common, jitter_csv, jitter_area, g1sq_area, shift, plateau_counts);
    if (*compare) return cmd_compare(common, g2_csv, prediction_csv);
    if (*report) return cmd_report(common, defaults, eta, eta_phase);
    if (*selftest) return cmd_selftest();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
