// Binary tag file, little-endian:
//   magic "HBTT" | version u16 = 1 | reserved u16 = 0 | resolution_fs u64 |
//   duration_ticks u64 | record_count u64          (32-byte header)
//   record_count x { channel u8, tick u64 }         (9 bytes each)

#include <fstream>
#include <iterator>

#include "hbt/detection.hpp"

namespace hbt {
namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'B', 'T', 'T'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void put_le(std::uint8_t* dst, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

template <class T>
T get_le(const std::uint8_t* src) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(src[i]) << (8 * i);
  return value;
}

}  // namespace

std::vector<std::uint8_t> serialize_tags(const TagStream& tags) {
  std::vector<std::uint8_t> bytes(kTagHeaderBytes + kTagRecordBytes * tags.records.size());
  std::uint8_t* p = bytes.data();
  std::copy(std::begin(kMagic), std::end(kMagic), p);
  put_le<std::uint16_t>(p + 4, kVersion);
  put_le<std::uint16_t>(p + 6, 0);
  put_le<std::uint64_t>(p + 8, static_cast<std::uint64_t>(tags.resolution.count()));
  put_le<std::uint64_t>(p + 16, tags.duration_ticks);
  put_le<std::uint64_t>(p + 24, tags.records.size());
  p += kTagHeaderBytes;
  for (const auto& r : tags.records) {
    p[0] = r.channel;
    put_le<std::uint64_t>(p + 1, r.tick);
    p += kTagRecordBytes;
  }
  return bytes;
}

TagStream deserialize_tags(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTagHeaderBytes) throw TagFileError(TagFileErrorCode::Truncated, "tag file: truncated header");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw TagFileError(TagFileErrorCode::BadMagic, "tag file: bad magic");
  }
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kVersion) {
    throw TagFileError(TagFileErrorCode::VersionMismatch, "tag file: unsupported version " + std::to_string(version));
  }
  TagStream tags;
  tags.resolution = Femtoseconds{static_cast<std::int64_t>(get_le<std::uint64_t>(bytes.data() + 8))};
  tags.duration_ticks = get_le<std::uint64_t>(bytes.data() + 16);
  const auto count = get_le<std::uint64_t>(bytes.data() + 24);
  if ((bytes.size() - kTagHeaderBytes) / kTagRecordBytes < count ||
      bytes.size() != kTagHeaderBytes + count * kTagRecordBytes) {
    throw TagFileError(TagFileErrorCode::Truncated, "tag file: record section does not match record count");
  }
  tags.records.resize(count);
  const std::uint8_t* p = bytes.data() + kTagHeaderBytes;
  for (auto& r : tags.records) {
    r.channel = p[0];
    r.tick = get_le<std::uint64_t>(p + 1);
    p += kTagRecordBytes;
  }
  if (!tags.is_sorted()) throw TagFileError(TagFileErrorCode::Unsorted, "tag file: records not sorted by (tick, channel)");
  return tags;
}

void write_tags(const TagStream& tags, const std::filesystem::path& path) {
  if (!tags.is_sorted()) throw TagFileError(TagFileErrorCode::Unsorted, "write_tags: records not sorted");
  const auto bytes = serialize_tags(tags);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw TagFileError(TagFileErrorCode::Io, "write_tags: cannot open " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw TagFileError(TagFileErrorCode::Io, "write_tags: write failed for " + path.string());
}

TagStream read_tags(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TagFileError(TagFileErrorCode::Io, "read_tags: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return deserialize_tags(bytes);
}

void write_tags_csv(const TagStream& tags, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw TagFileError(TagFileErrorCode::Io, "write_tags_csv: cannot open " + path.string());
  os << "channel,tick\n";
  for (const auto& r : tags.records) os << static_cast<unsigned>(r.channel) << ',' << r.tick << '\n';
}

}  // namespace hbt
