#include "pasar/mcs.hpp"

#include <cmath>
#include <string>

#include "pasar/errors.hpp"

namespace pasar {

int McsConfig::bits_per_symbol() const {
  int bits = 0;
  for (int m = modulation_order; m > 1; m >>= 1) ++bits;
  return bits;
}

std::size_t McsConfig::info_bits() const {
  const double bits = code_rate * symbols_per_packet * bits_per_symbol();
  return static_cast<std::size_t>(std::floor(bits + 1e-9));
}

std::size_t McsConfig::capacity() const {
  if (quant_bits <= 0) return 0;
  const double params = code_rate * symbols_per_packet * bits_per_symbol() / quant_bits;
  return static_cast<std::size_t>(std::floor(params + 1e-9));
}

void McsConfig::validate() const {
  switch (modulation_order) {
    case 2: case 4: case 16: case 64: case 256: break;
    default:
      throw ConfigError("modulation order must be one of 2, 4, 16, 64, 256; got " +
                        std::to_string(modulation_order));
  }
  if (!(code_rate > 0.0 && code_rate <= 1.0)) {
    throw ConfigError("code rate must lie in (0, 1]");
  }
  if (symbols_per_packet < 1) throw ConfigError("symbols per packet must be >= 1");
  if (!std::isfinite(coding_gain_db)) throw ConfigError("coding gain must be finite");
  if (quant_bits < 2 || quant_bits > 32) throw ConfigError("quant_bits must lie in [2, 32]");
  if (capacity() == 0) throw ConfigError("packet capacity is zero: MCS cannot carry one parameter");
}

const CodingGainTable& default_coding_gain_table() {
  static const CodingGainTable table{
      {1.0 / 2.0, 6.0}, {2.0 / 3.0, 5.0}, {3.0 / 4.0, 4.0}, {5.0 / 6.0, 3.0}};
  return table;
}

double coding_gain_for(const CodingGainTable& table, double code_rate) {
  for (const auto& [rate, gain] : table) {
    if (std::abs(rate - code_rate) <= 1e-6) return gain;
  }
  throw ConfigError("no coding gain configured for code rate " + std::to_string(code_rate));
}

McsConfig mcs_for_payload(int info_bits, int modulation_order, double code_rate,
                          double coding_gain_db, int quant_bits) {
  McsConfig mcs;
  mcs.modulation_order = modulation_order;
  mcs.code_rate = code_rate;
  mcs.coding_gain_db = coding_gain_db;
  mcs.quant_bits = quant_bits;
  if (info_bits < 1) throw ConfigError("packet payload must be >= 1 information bit");
  const int bps = mcs.bits_per_symbol();
  if (bps < 1 || !(code_rate > 0.0)) throw ConfigError("invalid modulation or code rate");
  mcs.symbols_per_packet =
      static_cast<int>(std::ceil(static_cast<double>(info_bits) / (code_rate * bps) - 1e-9));
  mcs.validate();
  return mcs;
}

}  // namespace pasar
