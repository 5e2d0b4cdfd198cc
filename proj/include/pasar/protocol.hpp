#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "pasar/channel.hpp"
#include "pasar/lossmodel.hpp"
#include "pasar/sensitivity.hpp"

namespace pasar {

// Source of the per-attempt BER the device records.
//   analytic:  model BER of the attempt (perfect CSIR)
//   empirical: flipped bits / payload bits of the realized copy
enum class BerMode { Analytic, Empirical };
std::string_view to_string(BerMode mode) noexcept;
BerMode parse_ber_mode(std::string_view text);

inline constexpr std::int64_t kDefaultTransmissionLimit = 25000;

struct SessionConfig {
  Scheme scheme = Scheme::Pasar;
  double beta_total = 0.0;
  std::int64_t t_max = kDefaultTransmissionLimit;  // cap on sum_t |V_t|
  ChannelConfig channel{};
  BudgetModel budget_model = BudgetModel::Eq13;
  BerMode ber_mode = BerMode::Analytic;
  std::uint64_t seed = 0;
  bool record_trace = false;

  void validate() const;
};

struct RoundTrace {
  std::size_t round = 0;
  std::vector<std::size_t> ack;
  std::vector<std::size_t> nack;
  double beta_res = 0.0;  // after the round
};

struct SessionResult {
  std::int64_t t_total = 0;
  std::vector<std::int64_t> per_packet_attempts;
  bool success = false;
  double realized_loss = 0.0;
  double predicted_loss_consumed = 0.0;
  std::size_t rounds = 0;
  std::vector<RoundTrace> trace;  // filled when record_trace is set
};

// Uniform draw over the n-bit signed range, seeded from the session seed.
std::vector<std::int64_t> draw_original_params(std::size_t dimension, int width,
                                               std::uint64_t seed);

// Runs one downloading session to completion or to the transmission cap.
SessionResult run_session(const SessionConfig& config, const SensitivityTable& table,
                          std::span<const std::int64_t> original_params);

struct AssembledModel {
  std::vector<double> values;
  double realized_loss = 0.0;
};

// receptions[j] holds every received copy of packet j. Packets with no copy
// assemble as zeros.
AssembledModel assemble(const std::vector<std::vector<std::vector<std::int64_t>>>& receptions,
                        std::span<const PacketSpec> packets, const SensitivityTable& table,
                        std::span<const std::int64_t> original_params);

}  // namespace pasar
