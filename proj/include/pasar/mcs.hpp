#pragma once

#include <cstddef>
#include <map>

namespace pasar {

// Modulation and coding scheme of one packet. The LDPC code is abstracted to
// a coding-gain offset applied to the instantaneous SNR.
struct McsConfig {
  int modulation_order = 4;      // M
  double code_rate = 0.5;        // fraction of information bits
  int symbols_per_packet = 1000; // W
  double coding_gain_db = 6.0;
  int quant_bits = 8;            // n

  // floor(rate * W * log2 M / n)
  std::size_t capacity() const;
  // Information bits carried per packet, floor(rate * W * log2 M).
  std::size_t info_bits() const;
  int bits_per_symbol() const;

  // Throws ConfigError when a field is out of range or capacity() == 0.
  void validate() const;
};

// Code rate -> coding gain (dB). Lookups match rates within 1e-6.
using CodingGainTable = std::map<double, double>;

const CodingGainTable& default_coding_gain_table();

// Throws ConfigError when the rate is not in the table.
double coding_gain_for(const CodingGainTable& table, double code_rate);

// Smallest W whose information payload is at least info_bits.
McsConfig mcs_for_payload(int info_bits, int modulation_order, double code_rate,
                          double coding_gain_db, int quant_bits);

}  // namespace pasar
