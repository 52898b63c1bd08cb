#include "hbt/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hbt {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void KeyValueReport::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KeyValueReport::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueReport::set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }

std::string KeyValueReport::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueReport::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text();
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

CsvTable read_table(const std::filesystem::path& path, std::size_t expected_columns) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        t.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != expected_columns) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(expected_columns) + " columns");
    }
    if (t.header.empty()) {
      t.header = cells;
      t.columns.resize(expected_columns);
      continue;
    }
    for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_number(cells[c], path, lineno));
  }
  if (t.header.empty()) throw std::runtime_error(path.string() + ": missing header row");
  return t;
}

double meta_number(const CsvTable& t, const std::string& key, const std::filesystem::path& path) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) throw std::runtime_error(path.string() + ": missing metadata '" + key + "'");
  return parse_number(it->second, path, 0);
}

double meta_number_or(const CsvTable& t, const std::string& key, double fallback) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) return fallback;
  double v = fallback;
  std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  return v;
}

}  // namespace

void write_histogram_csv(const CorrelationHistogram& hist, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# bin_width_fs=" << hist.bin_width.count() << '\n';
  f << "# total_time_s=" << format_double(hist.total_time_s) << '\n';
  f << "# events_a=" << hist.events_a << '\n';
  f << "# events_b=" << hist.events_b << '\n';
  f << "delay_ps,counts\n";
  for (std::size_t k = 0; k < hist.size(); ++k) f << format_double(hist.delay_ps(k)) << ',' << hist.counts[k] << '\n';
}

CorrelationHistogram read_histogram_csv(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, 2);
  CorrelationHistogram h;
  h.bin_width = Femtoseconds{static_cast<std::int64_t>(meta_number(t, "bin_width_fs", path))};
  h.total_time_s = meta_number(t, "total_time_s", path);
  h.events_a = static_cast<std::uint64_t>(meta_number_or(t, "events_a", 0.0));
  h.events_b = static_cast<std::uint64_t>(meta_number_or(t, "events_b", 0.0));
  const auto n = t.columns[1].size();
  if (n % 2 != 1) throw std::runtime_error(path.string() + ": histogram must have an odd number of bins");
  h.half_bins = static_cast<std::int64_t>(n / 2);
  h.counts.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = t.columns[1][k];
    if (c < 0.0 || c != std::floor(c)) throw std::runtime_error(path.string() + ": counts must be non-negative integers");
    h.counts[k] = static_cast<std::uint64_t>(c);
  }
  return h;
}

void write_g2_csv(const G2Estimate& g2, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# plateau_mean=" << format_double(g2.plateau_mean) << '\n';
  f << "# plateau_bins=" << g2.plateau_bins << '\n';
  f << "# bin_width_ps=" << format_double(g2.bin_width_ps) << '\n';
  f << "delay_ps,g2,sigma\n";
  for (std::size_t k = 0; k < g2.g2.size(); ++k) {
    f << format_double(g2.delays_ps[k]) << ',' << format_double(g2.g2[k]) << ',' << format_double(g2.sigma[k]) << '\n';
  }
}

G2Estimate read_g2_csv(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, 3);
  G2Estimate g;
  g.delays_ps = t.columns[0];
  g.g2 = t.columns[1];
  g.sigma = t.columns[2];
  g.plateau_mean = meta_number_or(t, "plateau_mean", 0.0);
  g.plateau_bins = static_cast<std::size_t>(meta_number_or(t, "plateau_bins", 0.0));
  g.bin_width_ps = meta_number_or(t, "bin_width_ps", g.delays_ps.size() > 1 ? g.delays_ps[1] - g.delays_ps[0] : 0.0);
  return g;
}

void write_jitter_curve_csv(const JitterCurve& curve, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# bin_width_ps=" << format_double(curve.bin_width_ps) << '\n';
  f << "# area_ps=" << format_double(curve.area_ps) << '\n';
  f << "delay_ps,value\n";
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    f << format_double(curve.delays_ps[k]) << ',' << format_double(curve.values[k]) << '\n';
  }
}

void write_prediction_csv(const PredictedPeak& p, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# height=" << format_double(p.height) << '\n';
  f << "# area_ps=" << format_double(p.area_ps) << '\n';
  f << "# shift_ps=" << format_double(p.shift_ps) << '\n';
  for (const auto& w : p.warnings) f << "# warning: " << w << '\n';
  f << "delay_ps,excess,g2\n";
  for (std::size_t k = 0; k < p.excess.size(); ++k) {
    f << format_double(p.delays_ps[k]) << ',' << format_double(p.excess[k]) << ',' << format_double(p.g2(k)) << '\n';
  }
}

PredictedPeak read_prediction_csv(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, 3);
  PredictedPeak p;
  p.delays_ps = t.columns[0];
  p.excess = t.columns[1];
  p.height = meta_number(t, "height", path);
  p.area_ps = meta_number_or(t, "area_ps", 0.0);
  p.shift_ps = meta_number_or(t, "shift_ps", 0.0);
  return p;
}

void write_interferogram_csv(const Interferogram& ifg, const std::filesystem::path& path, int average) {
  if (average < 1) throw std::invalid_argument("interferogram: display averaging must be at least 1");
  auto f = open_out(path);
  f << "# window_ms=" << format_double(ifg.window_ms * average) << '\n';
  if (average > 1) f << "# averaged_windows=" << average << '\n';
  f << "position_mm,counts\n";
  const auto n = ifg.counts.size() / static_cast<std::size_t>(average) * static_cast<std::size_t>(average);
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(average)) {
    double x = 0.0;
    double c = 0.0;
    for (std::size_t j = i; j < i + static_cast<std::size_t>(average); ++j) {
      x += ifg.positions_mm[j];
      c += ifg.counts[j];
    }
    f << format_double(x / average) << ',' << format_double(c) << '\n';
  }
}

Interferogram read_interferogram_csv(const std::filesystem::path& path) {
  const CsvTable t = read_table(path, 2);
  Interferogram ifg;
  ifg.positions_mm = t.columns[0];
  ifg.counts = t.columns[1];
  ifg.window_ms = meta_number(t, "window_ms", path);
  return ifg;
}

void write_envelope_csv(const EnvelopeCurve& env, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# vmax_raw=" << format_double(env.vmax_raw) << '\n';
  f << "# clipped_windows=" << env.clipped_windows << '\n';
  f << "delay_ps,g1\n";
  for (std::size_t k = 0; k < env.values.size(); ++k) {
    f << format_double(env.delays_ps[k]) << ',' << format_double(env.values[k]) << '\n';
  }
}

void write_residuals_csv(const ComparisonReport& report, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "delay_ps,residual_sigma\n";
  for (std::size_t k = 0; k < report.residual_sigma.size(); ++k) {
    f << format_double(report.delays_ps[k]) << ',' << format_double(report.residual_sigma[k]) << '\n';
  }
}

}  // namespace hbt
