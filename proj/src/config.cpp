#include "hbt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hbt {

using nlohmann::json;

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.source.spectrum = {SpectrumShape::Gaussian, 50.0, 810.0};
  for (std::size_t i = 0; i < 2; ++i) {
    c.detectors[i].channel = static_cast<std::uint8_t>(i);
    c.detectors[i].jitter = GaussianJitter{200.0 / std::sqrt(2.0)};
  }
  return c;
}

ExperimentConfig ExperimentConfig::paper() {
  ExperimentConfig c;
  c.source.spectrum = {SpectrumShape::Gaussian, 2.8, 810.0};
  for (std::size_t i = 0; i < 2; ++i) {
    c.detectors[i].channel = static_cast<std::uint8_t>(i);
    c.detectors[i].jitter = GaussianJitter{640.0 / std::sqrt(2.0)};
  }
  c.run.duration_s = 16.0 * 3600.0;
  c.run.segments = 5760;
  c.correlation.peak_lo_ps = -1000.0;
  c.correlation.peak_hi_ps = 1000.0;
  c.prediction.g1sq_source = G1AreaSource::Scan;
  return c;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    source.spectrum.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("source.spectrum: ") + e.what());
  }
  require(source.rate_hz > 0.0, "source.rate_hz must be positive");
  require(source.intensity_cap > 1.0, "source.intensity_cap must exceed 1");
  require(optics.transmittance >= 0.0 && optics.transmittance <= 1.0, "optics.transmittance must be in [0, 1]");
  require(optics.efficiency_a >= 0.0 && optics.efficiency_a <= 1.0, "optics.efficiency_a must be in [0, 1]");
  require(optics.efficiency_b >= 0.0 && optics.efficiency_b <= 1.0, "optics.efficiency_b must be in [0, 1]");
  require(optics.delay_ns >= 0.0, "optics.delay_ns must be non-negative");
  for (std::size_t i = 0; i < 2; ++i) {
    try {
      detectors[i].validate();
    } catch (const std::exception& e) {
      throw ConfigError("detectors[" + std::to_string(i) + "]: " + e.what());
    }
  }
  require(detectors[0].tag_resolution == detectors[1].tag_resolution,
          "detectors: both channels must share one tag resolution");
  require(run.duration_s > 0.0, "run.duration_s must be positive");
  require(run.segments >= 1, "run.segments must be at least 1");
  require(run.duration_s / run.segments < 3600.0, "run: segments longer than one hour overflow the clock");
  const Femtoseconds res = detectors[0].tag_resolution;
  const Femtoseconds bin = from_ps(correlation.bin_width_ps);
  require(bin.count() > 0 && bin.count() % res.count() == 0,
          "correlation.bin_width_ps must be a positive multiple of the tag resolution");
  require(correlation.max_lag_ns > 0.0, "correlation.max_lag_ns must be positive");
  require(correlation.plateau_lo_ns >= 0.0 && correlation.plateau_hi_ns > correlation.plateau_lo_ns,
          "correlation: plateau window must satisfy 0 <= lo < hi");
  require(correlation.plateau_hi_ns <= correlation.max_lag_ns, "correlation.plateau_hi_ns exceeds max_lag_ns");
  require(correlation.peak_hi_ps > correlation.peak_lo_ps, "correlation: peak window must satisfy lo < hi");
  require(std::max(std::abs(correlation.peak_lo_ps), std::abs(correlation.peak_hi_ps)) <=
              correlation.plateau_lo_ns * 1e3,
          "correlation: peak window overlaps the plateau");
  require(calibration.pair_rate_hz > 0.0, "calibration.pair_rate_hz must be positive");
  require(calibration.pair_spread_ps >= 0.0, "calibration.pair_spread_ps must be non-negative");
  require(calibration.duration_s > 0.0, "calibration.duration_s must be positive");
  require(calibration.segments >= 1, "calibration.segments must be at least 1");
  require(prediction.g1sq_source != G1AreaSource::Value || prediction.g1sq_area_ps > 0.0,
          "prediction.g1sq_area_ps must be positive");
  require(prediction.window_fringes >= 2, "prediction.window_fringes must be at least 2");
  try {
    scan.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scan: ") + e.what());
  }
}

namespace {

// Reads members of one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name(key) + ": wrong value type");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const char* key) const { return j_.at(key); }
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + name(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_detector(const json& j, const std::string& path, DetectorConfig& d) {
  Section s(j, path);
  double dead_ns = static_cast<double>(d.dead_time.count()) * 1e-6;
  double res_ps = to_ps(d.tag_resolution);
  s.read("quantum_efficiency", d.quantum_efficiency);
  s.read("dark_rate_hz", d.dark_rate_hz);
  s.read("dead_time_ns", dead_ns);
  s.read("saturation_rate_hz", d.saturation_rate_hz);
  s.read("tag_resolution_ps", res_ps);
  d.dead_time = from_ns(dead_ns);
  d.tag_resolution = from_ps(res_ps);
  if (s.has("jitter")) {
    Section js(s.at("jitter"), s.name("jitter"));
    std::string type = "gaussian";
    js.read("type", type);
    if (type == "gaussian") {
      GaussianJitter g{std::holds_alternative<GaussianJitter>(d.jitter) ? std::get<GaussianJitter>(d.jitter).fwhm_ps : 0.0};
      js.read("fwhm_ps", g.fwhm_ps);
      d.jitter = g;
    } else if (type == "empirical") {
      EmpiricalJitter e;
      js.read("edges_ps", e.edges_ps);
      js.read("weights", e.weights);
      d.jitter = e;
    } else {
      throw ConfigError(js.name("type") + ": expected 'gaussian' or 'empirical'");
    }
    js.finish();
  }
  s.finish();
}

json detector_json(const DetectorConfig& d) {
  json j;
  j["quantum_efficiency"] = d.quantum_efficiency;
  j["dark_rate_hz"] = d.dark_rate_hz;
  j["dead_time_ns"] = static_cast<double>(d.dead_time.count()) * 1e-6;
  j["saturation_rate_hz"] = d.saturation_rate_hz;
  j["tag_resolution_ps"] = to_ps(d.tag_resolution);
  if (const auto* g = std::get_if<GaussianJitter>(&d.jitter)) {
    j["jitter"] = {{"type", "gaussian"}, {"fwhm_ps", g->fwhm_ps}};
  } else {
    const auto& e = std::get<EmpiricalJitter>(d.jitter);
    j["jitter"] = {{"type", "empirical"}, {"edges_ps", e.edges_ps}, {"weights", e.weights}};
  }
  return j;
}

std::string to_string(G1AreaSource s) {
  switch (s) {
    case G1AreaSource::Analytic: return "analytic";
    case G1AreaSource::Scan: return "scan";
    case G1AreaSource::Value: return "value";
  }
  return "analytic";
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(root, "");
  std::string preset = "desk";
  top.read("preset", preset);
  ExperimentConfig c;
  if (preset == "desk") {
    c = ExperimentConfig::desk();
  } else if (preset == "paper") {
    c = ExperimentConfig::paper();
  } else {
    throw ConfigError("preset: expected 'desk' or 'paper'");
  }
  top.read("master_seed", c.master_seed);

  if (top.has("source")) {
    Section s(root.at("source"), "source");
    std::string kind = c.source.kind == SourceKind::Thermal ? "thermal" : "coherent";
    std::string shape(to_string(c.source.spectrum.shape));
    s.read("kind", kind);
    s.read("shape", shape);
    s.read("coherence_time_ps", c.source.spectrum.coherence_time_ps);
    s.read("center_wavelength_nm", c.source.spectrum.center_wavelength_nm);
    s.read("rate_hz", c.source.rate_hz);
    s.read("intensity_cap", c.source.intensity_cap);
    s.finish();
    if (kind == "thermal") {
      c.source.kind = SourceKind::Thermal;
    } else if (kind == "coherent") {
      c.source.kind = SourceKind::Coherent;
    } else {
      throw ConfigError("source.kind: expected 'thermal' or 'coherent'");
    }
    try {
      c.source.spectrum.shape = spectrum_shape_from_string(shape);
    } catch (const std::exception&) {
      throw ConfigError("source.shape: expected 'gaussian' or 'lorentzian'");
    }
  }
  if (top.has("optics")) {
    Section s(root.at("optics"), "optics");
    s.read("transmittance", c.optics.transmittance);
    s.read("delay_ns", c.optics.delay_ns);
    s.read("efficiency_a", c.optics.efficiency_a);
    s.read("efficiency_b", c.optics.efficiency_b);
    s.finish();
  }
  if (top.has("detectors")) {
    const json& d = root.at("detectors");
    if (d.is_array()) {
      if (d.size() != 2) throw ConfigError("detectors: expected exactly two entries");
      for (std::size_t i = 0; i < 2; ++i) read_detector(d[i], "detectors[" + std::to_string(i) + "]", c.detectors[i]);
    } else {
      // One object applies to both channels.
      for (std::size_t i = 0; i < 2; ++i) read_detector(d, "detectors", c.detectors[i]);
    }
  }
  if (top.has("run")) {
    Section s(root.at("run"), "run");
    s.read("duration_s", c.run.duration_s);
    s.read("segments", c.run.segments);
    s.read("write_tags", c.run.write_tags);
    s.finish();
  }
  if (top.has("correlation")) {
    Section s(root.at("correlation"), "correlation");
    s.read("bin_width_ps", c.correlation.bin_width_ps);
    s.read("max_lag_ns", c.correlation.max_lag_ns);
    s.read("plateau_lo_ns", c.correlation.plateau_lo_ns);
    s.read("plateau_hi_ns", c.correlation.plateau_hi_ns);
    s.read("peak_lo_ps", c.correlation.peak_lo_ps);
    s.read("peak_hi_ps", c.correlation.peak_hi_ps);
    s.finish();
  }
  if (top.has("calibration")) {
    Section s(root.at("calibration"), "calibration");
    s.read("pair_rate_hz", c.calibration.pair_rate_hz);
    s.read("pair_spread_ps", c.calibration.pair_spread_ps);
    s.read("duration_s", c.calibration.duration_s);
    s.read("segments", c.calibration.segments);
    s.finish();
  }
  if (top.has("prediction")) {
    Section s(root.at("prediction"), "prediction");
    std::string src = to_string(c.prediction.g1sq_source);
    s.read("g1sq_source", src);
    s.read("g1sq_area_ps", c.prediction.g1sq_area_ps);
    s.read("shift_ps", c.prediction.shift_ps);
    s.read("window_fringes", c.prediction.window_fringes);
    s.finish();
    if (src == "analytic") {
      c.prediction.g1sq_source = G1AreaSource::Analytic;
    } else if (src == "scan") {
      c.prediction.g1sq_source = G1AreaSource::Scan;
    } else if (src == "value") {
      c.prediction.g1sq_source = G1AreaSource::Value;
    } else {
      throw ConfigError("prediction.g1sq_source: expected 'analytic', 'scan' or 'value'");
    }
  }
  if (top.has("scan")) {
    Section s(root.at("scan"), "scan");
    s.read("mirror_speed_mm_s", c.scan.mirror_speed_mm_s);
    s.read("scan_range_mm", c.scan.scan_range_mm);
    s.read("window_ms", c.scan.window_ms);
    s.read("background_rate_hz", c.scan.background_rate_hz);
    s.read("max_visibility", c.scan.max_visibility);
    s.read("base_rate_hz", c.scan.base_rate_hz);
    s.finish();
  }
  top.finish();
  c.detectors[0].channel = 0;
  c.detectors[1].channel = 1;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["master_seed"] = c.master_seed;
  j["source"] = {{"kind", c.source.kind == SourceKind::Thermal ? "thermal" : "coherent"},
                 {"shape", std::string(to_string(c.source.spectrum.shape))},
                 {"coherence_time_ps", c.source.spectrum.coherence_time_ps},
                 {"center_wavelength_nm", c.source.spectrum.center_wavelength_nm},
                 {"rate_hz", c.source.rate_hz},
                 {"intensity_cap", c.source.intensity_cap}};
  j["optics"] = {{"transmittance", c.optics.transmittance},
                 {"delay_ns", c.optics.delay_ns},
                 {"efficiency_a", c.optics.efficiency_a},
                 {"efficiency_b", c.optics.efficiency_b}};
  j["detectors"] = json::array({detector_json(c.detectors[0]), detector_json(c.detectors[1])});
  j["run"] = {{"duration_s", c.run.duration_s}, {"segments", c.run.segments}, {"write_tags", c.run.write_tags}};
  j["correlation"] = {{"bin_width_ps", c.correlation.bin_width_ps},   {"max_lag_ns", c.correlation.max_lag_ns},
                      {"plateau_lo_ns", c.correlation.plateau_lo_ns}, {"plateau_hi_ns", c.correlation.plateau_hi_ns},
                      {"peak_lo_ps", c.correlation.peak_lo_ps},       {"peak_hi_ps", c.correlation.peak_hi_ps}};
  j["calibration"] = {{"pair_rate_hz", c.calibration.pair_rate_hz},
                      {"pair_spread_ps", c.calibration.pair_spread_ps},
                      {"duration_s", c.calibration.duration_s},
                      {"segments", c.calibration.segments}};
  j["prediction"] = {{"g1sq_source", to_string(c.prediction.g1sq_source)},
                     {"g1sq_area_ps", c.prediction.g1sq_area_ps},
                     {"shift_ps", c.prediction.shift_ps},
                     {"window_fringes", c.prediction.window_fringes}};
  j["scan"] = {{"mirror_speed_mm_s", c.scan.mirror_speed_mm_s}, {"scan_range_mm", c.scan.scan_range_mm},
               {"window_ms", c.scan.window_ms},                 {"background_rate_hz", c.scan.background_rate_hz},
               {"max_visibility", c.scan.max_visibility},       {"base_rate_hz", c.scan.base_rate_hz}};
  return j.dump(2) + "\n";
}

}  // namespace hbt
