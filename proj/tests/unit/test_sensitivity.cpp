#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "pasar/errors.hpp"
#include "pasar/mcs.hpp"
#include "pasar/sensitivity.hpp"

using namespace pasar;

namespace {

std::filesystem::path data_file(const char* name) {
  return std::filesystem::path(PASAR_TEST_DATA_DIR) / name;
}

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "pasar-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("PSNS encoding matches the little-endian layout byte for byte") {
  const SensitivityTable table({0.5, 0.0, 1.25});
  const std::vector<std::uint8_t> expected = {
      'P', 'S', 'N', 'S', 0x01, 0x00, 0x08, 0x00,              // magic, version 1, n = 8
      0x03, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,          // D = 3
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xE0, 0x3F,          // 0.5
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,          // 0.0
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF4, 0x3F};         // 1.25
  CHECK(encode_psns(table) == expected);

  const auto parsed = parse_psns(expected);
  CHECK(parsed.size() == 3);
  CHECK(parsed[0] == 0.5);
  CHECK(parsed[1] == 0.0);
  CHECK(parsed[2] == 1.25);
  CHECK(parsed.quant_bits() == 8);
}

TEST_CASE("PSNS rejects malformed input") {
  auto bytes = encode_psns(SensitivityTable({0.5, 0.0, 1.25}));
  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(parse_psns(bytes), FormatError);
  }
  SUBCASE("unknown version") {
    bytes[4] = 2;
    CHECK_THROWS_AS(parse_psns(bytes), FormatError);
  }
  SUBCASE("truncated payload") {
    bytes.pop_back();
    CHECK_THROWS_AS(parse_psns(bytes), FormatError);
  }
  SUBCASE("trailing bytes") {
    bytes.push_back(0);
    CHECK_THROWS_AS(parse_psns(bytes), FormatError);
  }
  SUBCASE("short header") {
    bytes.resize(10);
    CHECK_THROWS_AS(parse_psns(bytes), FormatError);
  }
  SUBCASE("negative entry") {
    // -0.1 as IEEE-754 little-endian
    const double v = -0.1;
    std::memcpy(&bytes[16], &v, sizeof v);
    CHECK_THROWS_AS(parse_psns(bytes), DomainError);
  }
}

TEST_CASE("table construction validates entries") {
  CHECK_THROWS_AS(SensitivityTable({}), DomainError);
  CHECK_THROWS_AS(SensitivityTable({1.0, -0.1}), DomainError);
  CHECK_THROWS_AS(SensitivityTable({1.0, NAN}), DomainError);
  CHECK_THROWS_AS(SensitivityTable({INFINITY}), DomainError);
  CHECK(SensitivityTable({0.0}).total() == 0.0);
}

TEST_CASE("CSV round-trips at full precision") {
  const SensitivityTable table({0.1, 1.0 / 3.0, 2.5e-17, 7.0});
  const auto parsed = parse_csv(encode_csv(table));
  CHECK(parsed.size() == table.size());
  for (std::size_t d = 0; d < table.size(); ++d) CHECK(parsed[d] == table[d]);
}

TEST_CASE("CSV rejects malformed input") {
  CHECK_THROWS_AS(parse_csv("idx,value\n0,1.0\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("index,sensitivity\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("index,sensitivity\n0,1.0\n2,1.0\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("index,sensitivity\n0;1.0\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("index,sensitivity\n0,abc\n"), FormatError);
  CHECK_THROWS_AS(parse_csv("index,sensitivity\n0,-0.1\n"), DomainError);
  CHECK(parse_csv("index,sensitivity\r\n0,1.5\r\n1,2\r\n\n").size() == 2);
}

TEST_CASE("extractor CSV and PSNS exports load with matching contents") {
  const auto csv = load_table(data_file("toy_extract_100.csv"));
  const auto bin = load_table(data_file("toy_extract_100.psns"));
  REQUIRE(csv.size() == 100);
  REQUIRE(bin.size() == 100);
  for (std::size_t d = 0; d < 100; ++d) {
    CHECK(csv[d] >= 0.0);
    CHECK(csv[d] == bin[d]);
  }
  std::ifstream sum_file(data_file("toy_extract_100.sum"));
  double expected_sum = 0.0;
  sum_file >> expected_sum;
  CHECK(bin.total() == doctest::Approx(expected_sum).epsilon(1e-12));
  CHECK(bin.model_name() == "toy_extract_100");
}

TEST_CASE("load_table round-trips writer output in both formats") {
  const auto table = synthesize_table(257, Lognormal{}, 9);
  save_psns(table, scratch("rt.psns"));
  save_csv(table, scratch("rt.csv"));
  const auto a = load_table(scratch("rt.psns"));
  const auto b = load_table(scratch("rt.csv"));
  CHECK(std::equal(a.values().begin(), a.values().end(), table.values().begin()));
  CHECK(std::equal(b.values().begin(), b.values().end(), table.values().begin()));
  CHECK_THROWS_AS(load_table(scratch("does-not-exist.psns")), FormatError);
  write_bytes(scratch("bad.psns"), {'P', 'S', 'N', 'S', 1, 0});
  CHECK_THROWS_AS(load_table(scratch("bad.psns")), FormatError);
}

TEST_CASE("synthesize_table distributions") {
  SUBCASE("constant is degenerate") {
    const auto t = synthesize_table(10, Constant{1.0}, 1);
    CHECK(t.size() == 10);
    for (double v : t.values()) CHECK(v == 1.0);
    const auto s = stats(t);
    CHECK(s.skewness == 0.0);
    CHECK(s.degenerate);
  }
  SUBCASE("exponential skewness is close to 2") {
    const auto s = stats(synthesize_table(1'000'000, Exponential{1.0}, 3));
    CHECK(s.skewness == doctest::Approx(2.0).epsilon(0.05));
    CHECK(s.mean == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("lognormal is highly right-skewed") {
    CHECK(stats(synthesize_table(1'000'000, Lognormal{0.0, 1.0}, 4)).skewness > 1.0);
    CHECK(stats(synthesize_table(12'500, Lognormal{}, 1)).skewness > 1.0);
  }
  SUBCASE("deterministic per seed") {
    CHECK(synthesize_table(100, Lognormal{}, 5) == synthesize_table(100, Lognormal{}, 5));
    CHECK_FALSE(synthesize_table(100, Lognormal{}, 5) == synthesize_table(100, Lognormal{}, 6));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(synthesize_table(0, Lognormal{}, 1), DomainError);
    CHECK_THROWS_AS(synthesize_table(5, Lognormal{0.0, 0.0}, 1), DomainError);
    CHECK_THROWS_AS(synthesize_table(5, Exponential{-1.0}, 1), DomainError);
    CHECK_THROWS_AS(synthesize_table(5, Constant{-1.0}, 1), DomainError);
  }
}

TEST_CASE("stats by direct moment formulas") {
  SUBCASE("constant values") {
    const double v[] = {1, 1, 1};
    const auto s = stats(v);
    CHECK(s.skewness == 0.0);
    CHECK(s.variance == 0.0);
    CHECK(s.mean == 1.0);
  }
  SUBCASE("three-point sample [0, 0, 3]") {
    // mean 1; central moments m2 = (1 + 1 + 4)/3 = 2, m3 = (-1 - 1 + 8)/3 = 2
    const double v[] = {0, 0, 3};
    const auto s = stats(v);
    CHECK(s.mean == doctest::Approx(1.0));
    CHECK(s.median == 0.0);
    CHECK(s.variance == doctest::Approx(2.0));
    CHECK(s.skewness == doctest::Approx(2.0 / std::pow(2.0, 1.5)));
  }
  SUBCASE("even-length median averages the middle pair") {
    const double v[] = {4, 1, 3, 2};
    CHECK(stats(v).median == doctest::Approx(2.5));
  }
  SUBCASE("mirror image flips the sign of the skewness") {
    const double v[] = {0, 0, 3};
    const double w[] = {3, 3, 0};
    CHECK(stats(w).skewness == doctest::Approx(-stats(v).skewness));
  }
  CHECK_THROWS_AS(stats(std::span<const double>{}), DomainError);
}

TEST_CASE("prune removes the smallest entries and keeps order") {
  const SensitivityTable t({5, 1, 3, 2});
  const auto p = prune(t, 0.5);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == 5);
  CHECK(p[1] == 3);
  CHECK(prune(t, 0.0) == t);
  CHECK_THROWS_AS(prune(t, 1.0), DomainError);
  CHECK_THROWS_AS(prune(t, -0.1), DomainError);
  CHECK_THROWS_AS(prune(t, NAN), DomainError);

  SUBCASE("ties go in index order") {
    const auto q = prune(SensitivityTable({1, 2, 1, 1}), 0.5);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == 2);
    CHECK(q[1] == 1);
  }
  SUBCASE("pruning reduces lognormal skewness") {
    const auto table = synthesize_table(50'000, Lognormal{}, 2);
    CHECK(stats(prune(table, 0.2)).skewness < stats(table).skewness);
  }
  SUBCASE("survivors are the largest entries") {
    const auto table = synthesize_table(1000, Exponential{}, 8);
    const auto kept = prune(table, 0.3);
    CHECK(kept.size() == 700);
    std::vector<double> sorted(table.values().begin(), table.values().end());
    std::sort(sorted.begin(), sorted.end());
    const double kept_min = *std::min_element(kept.values().begin(), kept.values().end());
    CHECK(kept_min >= sorted[299]);
  }
}

TEST_CASE("packetize slices the vector by capacity") {
  SUBCASE("even split") {
    const auto packets = packetize(SensitivityTable(std::vector<double>(250, 1.0)), 125);
    REQUIRE(packets.size() == 2);
    CHECK(packets[0].size() == 125);
    CHECK(packets[1].size() == 125);
  }
  SUBCASE("singleton") {
    const auto packets = packetize(SensitivityTable({0.75}), 125);
    REQUIRE(packets.size() == 1);
    CHECK(packets[0].sensitivity == 0.75);
  }
  SUBCASE("ragged tail with sums checked against direct slices") {
    const auto table = synthesize_table(300, Lognormal{}, 11);
    const auto packets = packetize(table, 125);
    REQUIRE(packets.size() == 3);
    const std::size_t sizes[] = {125, 125, 50};
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(packets[j].id == j);
      CHECK(packets[j].begin == 125 * j);
      CHECK(packets[j].size() == sizes[j]);
      double sum = 0.0;
      for (std::size_t d = packets[j].begin; d < packets[j].end; ++d) sum += table[d];
      CHECK(packets[j].sensitivity == doctest::Approx(sum).epsilon(1e-14));
    }
  }
  SUBCASE("zero capacity") {
    CHECK_THROWS_AS(packetize(SensitivityTable({1.0}), 0), ConfigError);
  }
  SUBCASE("capacity from the MCS") {
    const auto mcs = mcs_for_payload(1000, 4, 0.5, 6.0, 8);
    CHECK(mcs.capacity() == 125);
    CHECK(mcs_for_payload(500, 4, 0.5, 6.0, 8).capacity() == 62);
    CHECK(packetize(synthesize_table(12'500, Lognormal{}, 1), mcs).size() == 100);
  }
}

}  // TEST_SUITE
