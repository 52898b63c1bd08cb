#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "hbt/detection.hpp"

using namespace hbt;

namespace {

TagStream sample_tags(std::size_t n) {
  std::mt19937_64 rng(42);
  TagStream t;
  t.resolution = Femtoseconds{82'200};
  std::uint64_t tick = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tick += rng() % 3;
    t.records.push_back({static_cast<std::uint8_t>(i % 2), tick});
  }
  std::sort(t.records.begin(), t.records.end(), [](const TagRecord& a, const TagRecord& b) {
    return a.tick != b.tick ? a.tick < b.tick : a.channel < b.channel;
  });
  t.duration_ticks = tick + 1;
  return t;
}

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("header layout is little-endian") {
  TagStream t;
  t.resolution = Femtoseconds{82'200};
  t.duration_ticks = 0x0102030405060708ULL;
  t.records = {{1, 0x1122334455667788ULL}};
  const auto bytes = serialize_tags(t);
  REQUIRE(bytes.size() == kTagHeaderBytes + kTagRecordBytes);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "HBTT");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  // resolution 82200 = 0x0001411 8
  CHECK(bytes[8] == 0x18);
  CHECK(bytes[9] == 0x41);
  CHECK(bytes[10] == 0x01);
  CHECK(bytes[16] == 0x08);
  CHECK(bytes[23] == 0x01);
  CHECK(bytes[24] == 1);
  CHECK(bytes[32] == 1);
  CHECK(bytes[33] == 0x88);
  CHECK(bytes[40] == 0x11);
}

TEST_CASE("file round trip is bit exact") {
  const TagStream t = sample_tags(100'000);
  const auto path = temp_file("hbt_roundtrip.hbtt");
  write_tags(t, path);
  CHECK(std::filesystem::file_size(path) == kTagHeaderBytes + kTagRecordBytes * t.records.size());
  const TagStream back = read_tags(path);
  CHECK(back.records == t.records);
  CHECK(back.resolution == t.resolution);
  CHECK(back.duration_ticks == t.duration_ticks);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt inputs produce distinct errors") {
  const auto good = serialize_tags(sample_tags(10));
  auto code_of = [](std::vector<std::uint8_t> b) {
    try {
      deserialize_tags(b);
    } catch (const TagFileError& e) {
      return static_cast<int>(e.code());
    }
    return -1;
  };
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of(bad_magic) == static_cast<int>(TagFileErrorCode::BadMagic));
  auto bad_version = good;
  bad_version[4] = 2;
  CHECK(code_of(bad_version) == static_cast<int>(TagFileErrorCode::VersionMismatch));
  auto truncated = good;
  truncated.pop_back();
  CHECK(code_of(truncated) == static_cast<int>(TagFileErrorCode::Truncated));
  CHECK(code_of(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)) ==
        static_cast<int>(TagFileErrorCode::Truncated));
  auto unsorted = good;
  std::swap_ranges(unsorted.begin() + 32, unsorted.begin() + 41, unsorted.end() - 9);
  CHECK(code_of(unsorted) == static_cast<int>(TagFileErrorCode::Unsorted));
  try {
    read_tags(temp_file("hbt_does_not_exist.hbtt"));
    FAIL("expected an error");
  } catch (const TagFileError& e) {
    CHECK(e.code() == TagFileErrorCode::Io);
  }
}

TEST_CASE("writing an unsorted stream is refused") {
  TagStream t;
  t.resolution = Femtoseconds{1};
  t.duration_ticks = 10;
  t.records = {{0, 5}, {0, 3}};
  CHECK_THROWS_AS(write_tags(t, temp_file("hbt_unsorted.hbtt")), TagFileError);
}

TEST_CASE("csv export") {
  TagStream t;
  t.resolution = Femtoseconds{1};
  t.duration_ticks = 10;
  t.records = {{0, 3}, {1, 7}};
  const auto path = temp_file("hbt_tags.csv");
  write_tags_csv(t, path);
  std::ifstream f(path);
  std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(all.find("channel,tick\n0,3\n1,7\n") != std::string::npos);
  std::filesystem::remove(path);
}
