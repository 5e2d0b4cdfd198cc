#include "pasar/sensitivity.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "pasar/errors.hpp"
#include "pasar/rng.hpp"

namespace pasar {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'N', 'S'};
constexpr std::uint16_t kPsnsVersion = 1;
constexpr std::size_t kPsnsHeaderBytes = 4 + 2 + 2 + 8;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[offset + i]) << (8 * i);
  }
  return value;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

SensitivityTable::SensitivityTable(std::vector<double> values, std::string model_name,
                                   int quant_bits)
    : values_(std::move(values)), model_name_(std::move(model_name)), quant_bits_(quant_bits) {
  if (values_.empty()) throw DomainError("sensitivity table must hold at least one entry");
  for (std::size_t d = 0; d < values_.size(); ++d) {
    if (!std::isfinite(values_[d]) || values_[d] < 0.0) {
      throw DomainError("sensitivity[" + std::to_string(d) + "] = " + std::to_string(values_[d]) +
                        " is not a finite non-negative value");
    }
  }
  if (quant_bits_ < 1 || quant_bits_ > 0xFFFF) {
    throw DomainError("quant_bits out of range: " + std::to_string(quant_bits_));
  }
}

double SensitivityTable::total() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

std::string describe(const Distribution& dist) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Lognormal>) {
          os << "lognormal(mu=" << d.mu << ", sigma=" << d.sigma << ")";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          os << "exponential(lambda=" << d.lambda << ")";
        } else {
          os << "constant(" << d.value << ")";
        }
      },
      dist);
  return os.str();
}

// ---------------------------------------------------------------------------
// PSNS binary: "PSNS" | u16 version | u16 quant_bits | u64 D | D x f64, all LE.

std::vector<std::uint8_t> encode_psns(const SensitivityTable& table) {
  std::vector<std::uint8_t> out;
  out.reserve(kPsnsHeaderBytes + 8 * table.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kPsnsVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(table.quant_bits()));
  put_le<std::uint64_t>(out, table.size());
  for (double v : table.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

SensitivityTable parse_psns(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPsnsHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a PSNS file: missing magic or truncated header");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kPsnsVersion) {
    throw FormatError("unsupported PSNS version " + std::to_string(version));
  }
  const auto quant_bits = get_le<std::uint16_t>(bytes, 6);
  const auto dimension = get_le<std::uint64_t>(bytes, 8);
  const std::size_t payload = bytes.size() - kPsnsHeaderBytes;
  if (dimension == 0 || payload % 8 != 0 || payload / 8 != dimension) {
    throw FormatError("PSNS length mismatch: header declares " + std::to_string(dimension) +
                      " entries, payload holds " + std::to_string(payload) + " bytes");
  }
  std::vector<double> values(dimension);
  for (std::size_t d = 0; d < dimension; ++d) {
    values[d] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, kPsnsHeaderBytes + 8 * d));
  }
  return SensitivityTable(std::move(values), {}, quant_bits);
}

// ---------------------------------------------------------------------------
// CSV: header "index,sensitivity", rows 0..D-1 strictly ascending.

SensitivityTable parse_csv(const std::string& text, int quant_bits) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "index,sensitivity") {
    throw FormatError("CSV header must be 'index,sensitivity'");
  }
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": expected two fields");
    }
    std::size_t index = 0;
    double value = 0.0;
    try {
      std::size_t used = 0;
      const std::string idx_text = trim(line.substr(0, comma));
      const long long idx = std::stoll(idx_text, &used);
      if (used != idx_text.size() || idx < 0) throw std::invalid_argument("index");
      index = static_cast<std::size_t>(idx);
      const std::string val_text = trim(line.substr(comma + 1));
      value = std::stod(val_text, &used);
      if (used != val_text.size()) throw std::invalid_argument("value");
    } catch (const std::logic_error&) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": unparsable row '" + line + "'");
    }
    if (index != values.size()) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": index " +
                        std::to_string(index) + " out of sequence, expected " +
                        std::to_string(values.size()));
    }
    values.push_back(value);
  }
  if (values.empty()) throw FormatError("CSV holds no sensitivity rows");
  return SensitivityTable(std::move(values), {}, quant_bits);
}

std::string encode_csv(const SensitivityTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "index,sensitivity\n";
  for (std::size_t d = 0; d < table.size(); ++d) os << d << ',' << table[d] << '\n';
  return os.str();
}

SensitivityTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open sensitivity file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  SensitivityTable table = (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0)
                               ? parse_psns(bytes)
                               : parse_csv(std::string(bytes.begin(), bytes.end()));
  return SensitivityTable(std::vector<double>(table.values().begin(), table.values().end()),
                          path.stem().string(), table.quant_bits());
}

void save_psns(const SensitivityTable& table, const std::filesystem::path& path) {
  const auto bytes = encode_psns(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void save_csv(const SensitivityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << encode_csv(table);
}

// ---------------------------------------------------------------------------

SensitivityTable synthesize_table(std::size_t dimension, const Distribution& dist,
                                  std::uint64_t seed, int quant_bits) {
  if (dimension == 0) throw DomainError("synthesize_table: dimension must be >= 1");
  std::vector<double> values(dimension);
  Rng rng = make_rng(seed, 0x53454e53);  // "SENS"
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Lognormal>) {
          if (!(d.sigma > 0.0) || !std::isfinite(d.mu)) {
            throw DomainError("lognormal requires sigma > 0 and finite mu");
          }
          std::lognormal_distribution<double> draw(d.mu, d.sigma);
          for (auto& v : values) v = draw(rng);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (!(d.lambda > 0.0) || !std::isfinite(d.lambda)) {
            throw DomainError("exponential requires lambda > 0");
          }
          std::exponential_distribution<double> draw(d.lambda);
          for (auto& v : values) v = draw(rng);
        } else {
          if (!(d.value >= 0.0) || !std::isfinite(d.value)) {
            throw DomainError("constant requires c >= 0");
          }
          std::fill(values.begin(), values.end(), d.value);
        }
      },
      dist);
  return SensitivityTable(std::move(values), describe(dist), quant_bits);
}

SensitivityStats stats(std::span<const double> values) {
  if (values.empty()) throw DomainError("stats of an empty table");
  const auto n = static_cast<double>(values.size());
  SensitivityStats out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  out.variance = m2;

  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  out.median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    out.median = 0.5 * (lower + out.median);
  }

  // Rounding leaves a tiny positive m2 for constant inputs; treat anything at
  // the level of the mean's own rounding error as zero spread.
  const double scale = std::max(std::abs(out.mean), 1e-300);
  if (m2 <= 1e-24 * scale * scale) {
    out.degenerate = true;
    out.skewness = 0.0;
  } else {
    out.skewness = m3 / std::pow(m2, 1.5);
  }
  return out;
}

SensitivityTable prune(const SensitivityTable& table, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw DomainError("prune rate must lie in [0, 1), got " + std::to_string(rate));
  }
  const std::size_t dimension = table.size();
  const auto removed = static_cast<std::size_t>(std::floor(rate * static_cast<double>(dimension)));
  if (removed == 0) return table;

  std::vector<std::size_t> order(dimension);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return table[a] < table[b]; });
  std::vector<bool> drop(dimension, false);
  for (std::size_t k = 0; k < removed; ++k) drop[order[k]] = true;

  std::vector<double> kept;
  kept.reserve(dimension - removed);
  for (std::size_t d = 0; d < dimension; ++d) {
    if (!drop[d]) kept.push_back(table[d]);
  }
  return SensitivityTable(std::move(kept), table.model_name(), table.quant_bits());
}

std::vector<PacketSpec> packetize(const SensitivityTable& table, std::size_t capacity) {
  if (capacity == 0) throw ConfigError("packet capacity is zero: MCS cannot carry one parameter");
  const auto values = table.values();
  const std::size_t dimension = values.size();
  std::vector<PacketSpec> packets;
  packets.reserve((dimension + capacity - 1) / capacity);
  for (std::size_t begin = 0; begin < dimension; begin += capacity) {
    const std::size_t end = std::min(begin + capacity, dimension);
    const double s = std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(begin),
                                     values.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
    packets.push_back({packets.size(), begin, end, s});
  }
  return packets;
}

std::vector<PacketSpec> packetize(const SensitivityTable& table, const McsConfig& mcs) {
  return packetize(table, mcs.capacity());
}

}  // namespace pasar
