#include "pasar/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "pasar/controller.hpp"
#include "pasar/errors.hpp"
#include "pasar/quantcodec.hpp"
#include "pasar/rng.hpp"

namespace pasar {

namespace {

constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kPacketStreamBase = 1ULL << 32;

// Fading and bit-noise use separate per-packet streams so the fade sequence of
// packet j is the same under every scheme and BER mode.
Rng fade_stream(std::uint64_t seed, std::size_t packet) {
  return make_rng(seed, kPacketStreamBase + 2 * packet);
}
Rng noise_stream(std::uint64_t seed, std::size_t packet) {
  return make_rng(seed, kPacketStreamBase + 2 * packet + 1);
}

}  // namespace

std::string_view to_string(BerMode mode) noexcept {
  return mode == BerMode::Analytic ? "analytic" : "empirical";
}

BerMode parse_ber_mode(std::string_view text) {
  std::string key(text);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "analytic") return BerMode::Analytic;
  if (key == "empirical") return BerMode::Empirical;
  throw ConfigError("unknown BER mode '" + std::string(text) + "' (expected analytic|empirical)");
}

void SessionConfig::validate() const {
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  if (!(beta_total >= 0.0) || !std::isfinite(beta_total)) {
    throw ConfigError("beta_total must be finite and non-negative");
  }
  if (std::isnan(channel.avg_snr_db)) throw ConfigError("average SNR is NaN");
  channel.mcs.validate();
}

std::vector<std::int64_t> draw_original_params(std::size_t dimension, int width,
                                               std::uint64_t seed) {
  Rng rng = make_rng(seed, kParamStream);
  std::uniform_int_distribution<std::int64_t> draw(min_value(width), max_value(width));
  std::vector<std::int64_t> params(dimension);
  for (auto& w : params) w = draw(rng);
  return params;
}

SessionResult run_session(const SessionConfig& config, const SensitivityTable& table,
                          std::span<const std::int64_t> original_params) {
  config.validate();
  const McsConfig& mcs = config.channel.mcs;
  const int width = mcs.quant_bits;
  if (original_params.size() != table.size()) {
    throw DomainError("original parameter vector length does not match the table dimension");
  }
  const std::int64_t lo = min_value(width);
  const std::int64_t hi = max_value(width);
  for (std::int64_t w : original_params) {
    if (w < lo || w > hi) {
      throw DomainError("parameter " + std::to_string(w) + " not representable in " +
                        std::to_string(width) + " bits");
    }
  }

  const std::vector<PacketSpec> packets = packetize(table, mcs);
  const std::size_t num_packets = packets.size();
  const double alpha = loss_scale(width);
  double total_sensitivity = 0.0;
  for (const auto& p : packets) total_sensitivity += p.sensitivity;

  std::vector<Rng> fades;
  std::vector<Rng> noises;
  fades.reserve(num_packets);
  noises.reserve(num_packets);
  for (std::size_t j = 0; j < num_packets; ++j) {
    fades.push_back(fade_stream(config.seed, j));
    noises.push_back(noise_stream(config.seed, j));
  }
  std::vector<CombiningState> combining(num_packets);
  std::vector<PacketLedger> ledgers;
  ledgers.reserve(num_packets);
  for (std::size_t j = 0; j < num_packets; ++j) ledgers.emplace_back(j);

  std::vector<std::int64_t> received_sum(table.size(), 0);
  std::vector<std::int64_t> received(mcs.capacity());
  BudgetState budget(config.beta_total);

  SessionResult result;
  std::vector<std::size_t> active(num_packets);
  for (std::size_t j = 0; j < num_packets; ++j) active[j] = j;
  std::vector<PacketCost> costs;
  costs.reserve(num_packets);

  while (!active.empty() &&
         result.t_total + static_cast<std::int64_t>(active.size()) <= config.t_max) {
    ++result.rounds;
    result.t_total += static_cast<std::int64_t>(active.size());
    costs.clear();

    for (std::size_t j : active) {
      const PacketSpec& packet = packets[j];
      combining[j].add(draw_fade(config.channel, fades[j]));
      const double ber = coded_ber(combining[j].effective_snr(config.scheme), mcs);

      const auto slice = original_params.subspan(packet.begin, packet.size());
      const std::span<std::int64_t> copy(received.data(), packet.size());
      const std::size_t flipped = transmit_words(slice, width, ber, noises[j], copy);
      for (std::size_t k = 0; k < packet.size(); ++k) received_sum[packet.begin + k] += copy[k];

      const double recorded =
          config.ber_mode == BerMode::Analytic
              ? ber
              : static_cast<double>(flipped) / static_cast<double>(packet.size() * width);
      ledgers[j].record(recorded);
      costs.push_back({j, packet.sensitivity, ledgers[j].charged_ber(config.budget_model)});
    }

    RoundDecision decision =
        config.scheme == Scheme::Pasar
            ? pasar_round({active, budget.residual(), config.beta_total, 1}, costs, width)
            : uniform_round(costs, budget.residual(), total_sensitivity, config.beta_total, width);

    for (std::size_t j : decision.ack) {
      const double cost = alpha * packets[j].sensitivity * ledgers[j].charged_ber(config.budget_model);
      ledgers[j].terminate(cost);
      budget.charge(cost);
    }
    if (config.scheme == Scheme::Pasar) budget.carry(decision.beta_res_next);

    if (config.record_trace) {
      result.trace.push_back({result.rounds, decision.ack, decision.nack, budget.residual()});
    }
    active = std::move(decision.nack);
  }

  result.success = active.empty();
  result.predicted_loss_consumed = budget.consumed();
  result.per_packet_attempts.resize(num_packets);

  std::vector<double> assembled(table.size(), 0.0);
  for (std::size_t j = 0; j < num_packets; ++j) {
    const auto attempts = ledgers[j].attempts();
    result.per_packet_attempts[j] = static_cast<std::int64_t>(attempts);
    if (attempts == 0) continue;
    for (std::size_t d = packets[j].begin; d < packets[j].end; ++d) {
      assembled[d] = static_cast<double>(received_sum[d]) / static_cast<double>(attempts);
    }
  }
  result.realized_loss = realized_model_loss(table, original_params, assembled);
  return result;
}

AssembledModel assemble(const std::vector<std::vector<std::vector<std::int64_t>>>& receptions,
                        std::span<const PacketSpec> packets, const SensitivityTable& table,
                        std::span<const std::int64_t> original_params) {
  if (receptions.size() != packets.size()) {
    throw DomainError("assemble: one reception list per packet required");
  }
  AssembledModel model;
  model.values.assign(table.size(), 0.0);
  for (std::size_t j = 0; j < packets.size(); ++j) {
    const PacketSpec& packet = packets[j];
    if (packet.end > table.size()) throw DomainError("assemble: packet range exceeds the table");
    if (receptions[j].empty()) continue;
    const std::vector<double> mean = combine_receptions(receptions[j]);
    if (mean.size() != packet.size()) {
      throw DomainError("assemble: copy length does not match packet " + std::to_string(j));
    }
    std::copy(mean.begin(), mean.end(), model.values.begin() + static_cast<std::ptrdiff_t>(packet.begin));
  }
  model.realized_loss = realized_model_loss(table, original_params, model.values);
  return model;
}

}  // namespace pasar
