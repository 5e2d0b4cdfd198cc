#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pasar/mcs.hpp"

namespace pasar {

// Per-parameter diagonal-Hessian sensitivities of a D-parameter model.
// Immutable once built; every entry is finite and non-negative.
class SensitivityTable {
 public:
  // Throws DomainError on an empty vector or a negative/non-finite entry.
  explicit SensitivityTable(std::vector<double> values, std::string model_name = {},
                            int quant_bits = 8);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t d) const noexcept { return values_[d]; }
  const std::string& model_name() const noexcept { return model_name_; }
  int quant_bits() const noexcept { return quant_bits_; }
  double total() const noexcept;

  friend bool operator==(const SensitivityTable&, const SensitivityTable&) = default;

 private:
  std::vector<double> values_;
  std::string model_name_;
  int quant_bits_;
};

struct SensitivityStats {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;  // population variance
  double skewness = 0.0;  // Fisher moment coefficient, population moments
  // Set when the variance is zero; skewness is then reported as 0.
  bool degenerate = false;
};

struct Lognormal {
  double mu = 0.0;
  double sigma = 1.2;
};
struct Exponential {
  double lambda = 1.0;
};
struct Constant {
  double value = 1.0;
};
using Distribution = std::variant<Lognormal, Exponential, Constant>;

std::string describe(const Distribution& dist);

// A contiguous slice [begin, end) of the parameter vector with its summed
// sensitivity.
struct PacketSpec {
  std::size_t id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double sensitivity = 0.0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const PacketSpec&, const PacketSpec&) = default;
};

// Reads either format, chosen by the leading magic bytes ("PSNS" for binary,
// anything else is parsed as CSV).
SensitivityTable load_table(const std::filesystem::path& path);
SensitivityTable parse_psns(std::span<const std::uint8_t> bytes);
SensitivityTable parse_csv(const std::string& text, int quant_bits = 8);

std::vector<std::uint8_t> encode_psns(const SensitivityTable& table);
std::string encode_csv(const SensitivityTable& table);
void save_psns(const SensitivityTable& table, const std::filesystem::path& path);
void save_csv(const SensitivityTable& table, const std::filesystem::path& path);

SensitivityTable synthesize_table(std::size_t dimension, const Distribution& dist,
                                  std::uint64_t seed, int quant_bits = 8);

SensitivityStats stats(std::span<const double> values);
inline SensitivityStats stats(const SensitivityTable& table) { return stats(table.values()); }

// Drops the floor(rate * D) smallest entries (ties removed in ascending index
// order) and keeps the survivors in their original order.
SensitivityTable prune(const SensitivityTable& table, double rate);

// Index-ordered packing, capacity parameters per packet.
std::vector<PacketSpec> packetize(const SensitivityTable& table, std::size_t capacity);
std::vector<PacketSpec> packetize(const SensitivityTable& table, const McsConfig& mcs);

}  // namespace pasar
