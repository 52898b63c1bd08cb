#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hbt/field_model.hpp"

namespace hbt {

struct GaussianJitter {
  double fwhm_ps = 0.0;
};

/// Tabulated jitter histogram: bin edges in ps (size = weights.size() + 1) and
/// the relative probability of each bin (e.g. measured counts).
struct EmpiricalJitter {
  std::vector<double> edges_ps;
  std::vector<double> weights;
};

using JitterModel = std::variant<GaussianJitter, EmpiricalJitter>;

struct DetectorConfig {
  std::uint8_t channel = 0;
  double quantum_efficiency = 0.5;
  double dark_rate_hz = 500.0;
  // Per-detector share of a 640 ps combined (two-detector) jitter.
  JitterModel jitter = GaussianJitter{640.0 / 1.4142135623730951};
  Femtoseconds dead_time = Femtoseconds{50'000'000};
  double saturation_rate_hz = 1e6;
  Femtoseconds tag_resolution = Femtoseconds{82'200};

  void validate() const;
};

struct TagRecord {
  std::uint8_t channel = 0;
  std::uint64_t tick = 0;

  friend bool operator==(const TagRecord&, const TagRecord&) = default;
};

/// Time-tagger output: records sorted by (tick, channel), all ticks < duration_ticks.
struct TagStream {
  Femtoseconds resolution{1};
  std::uint64_t duration_ticks = 0;
  std::vector<TagRecord> records;

  bool is_sorted() const;
  /// Ticks of one channel, ascending.
  std::vector<std::int64_t> channel_ticks(std::uint8_t channel) const;
  /// Ticks of all records, ascending.
  std::vector<std::int64_t> ticks() const;
  double duration_seconds() const { return to_seconds(resolution) * static_cast<double>(duration_ticks); }
};

struct DetectionDiagnostics {
  std::uint64_t photons_in = 0;
  std::uint64_t detected_photons = 0;
  std::uint64_t dark_counts = 0;
  std::uint64_t dropped_at_boundary = 0;
  std::uint64_t lost_to_dead_time = 0;
  std::uint64_t tags_out = 0;
  double output_rate_hz = 0.0;
  bool saturated = false;
};

/// Efficiency thinning -> dark counts -> jitter -> sort -> boundary drop ->
/// non-paralyzable dead time -> quantization to ticks.
TagStream detect(const PhotonStream& stream, const DetectorConfig& detector, Femtoseconds duration,
                 std::uint64_t seed, DetectionDiagnostics* diagnostics = nullptr);

/// Merge two tag streams with equal resolution into one (tick, channel)-sorted stream.
TagStream merge_tags(const TagStream& a, const TagStream& b);

struct InterArrivalHistogram {
  Femtoseconds bin_width{};
  std::vector<std::uint64_t> counts;  // bin k covers [k*w, (k+1)*w)

  /// Lower edge of the first non-empty bin; -1 fs when the histogram is empty.
  Femtoseconds first_occupied() const;
  double mean_interval_seconds() const;
};

/// Inter-arrival histogram of a single-channel stream up to `window`.
InterArrivalHistogram autocorrelation_deadtime_check(const TagStream& tags, Femtoseconds window,
                                                     Femtoseconds bin_width);

// Binary tag file --------------------------------------------------------------

enum class TagFileErrorCode { Io, BadMagic, VersionMismatch, Truncated, Unsorted };

class TagFileError : public std::runtime_error {
 public:
  TagFileError(TagFileErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TagFileErrorCode code() const { return code_; }

 private:
  TagFileErrorCode code_;
};

inline constexpr std::size_t kTagHeaderBytes = 32;
inline constexpr std::size_t kTagRecordBytes = 9;

std::vector<std::uint8_t> serialize_tags(const TagStream& tags);
TagStream deserialize_tags(std::span<const std::uint8_t> bytes);
void write_tags(const TagStream& tags, const std::filesystem::path& path);
TagStream read_tags(const std::filesystem::path& path);
void write_tags_csv(const TagStream& tags, const std::filesystem::path& path);

}  // namespace hbt
