#include "pasar/lossmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "pasar/errors.hpp"
#include "pasar/quantcodec.hpp"
#include "pasar/sensitivity.hpp"

namespace pasar {

std::string_view to_string(BudgetModel model) noexcept {
  return model == BudgetModel::Eq13 ? "eq13" : "averaged";
}

BudgetModel parse_budget_model(std::string_view text) {
  std::string key(text);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "eq13") return BudgetModel::Eq13;
  if (key == "averaged") return BudgetModel::Averaged;
  throw ConfigError("unknown budget model '" + std::string(text) + "' (expected eq13|averaged)");
}

double average_ber(std::span<const double> history) {
  if (history.empty()) throw DomainError("average_ber: empty history");
  return std::accumulate(history.begin(), history.end(), 0.0) / static_cast<double>(history.size());
}

double packet_loss(double sensitivity, double avg_ber, int width) {
  if (!(sensitivity >= 0.0)) throw DomainError("packet_loss: negative sensitivity");
  return loss_scale(width) * sensitivity * avg_ber;
}

double predicted_model_loss(std::span<const PacketBer> packets, int width) {
  double sum = 0.0;
  for (const auto& p : packets) {
    if (!(p.sensitivity >= 0.0)) throw DomainError("predicted_model_loss: negative sensitivity");
    if (!(p.ber >= 0.0 && p.ber <= 1.0)) throw DomainError("predicted_model_loss: BER outside [0, 1]");
    sum += p.sensitivity * p.ber;
  }
  return loss_scale(width) * sum;
}

std::vector<double> combine_receptions(const std::vector<std::vector<std::int64_t>>& copies) {
  if (copies.empty()) throw DomainError("combine_receptions: no copies");
  const std::size_t len = copies.front().size();
  std::vector<double> sum(len, 0.0);
  for (const auto& copy : copies) {
    if (copy.size() != len) throw DomainError("combine_receptions: copies differ in length");
    for (std::size_t k = 0; k < len; ++k) sum[k] += static_cast<double>(copy[k]);
  }
  const double count = static_cast<double>(copies.size());
  for (auto& v : sum) v /= count;
  return sum;
}

double realized_model_loss(const SensitivityTable& table, std::span<const std::int64_t> original,
                           std::span<const double> assembled) {
  if (original.size() != table.size() || assembled.size() != table.size()) {
    throw DomainError("realized_model_loss: vector lengths do not match the table dimension");
  }
  double loss = 0.0;
  for (std::size_t d = 0; d < table.size(); ++d) {
    const double delta = assembled[d] - static_cast<double>(original[d]);
    loss += table[d] * delta * delta;
  }
  return 0.5 * loss;
}

BudgetState::BudgetState(double beta_total) : total_(beta_total), residual_(beta_total) {
  if (!(beta_total >= 0.0) || !std::isfinite(beta_total)) {
    throw DomainError("beta_total must be finite and non-negative");
  }
}

void BudgetState::charge(double amount) {
  if (!(amount >= 0.0)) throw DomainError("budget charge must be non-negative");
  consumed_ += amount;
  residual_ = std::max(0.0, residual_ - amount);
}

void BudgetState::carry(double residual) {
  if (!(residual >= 0.0) || residual > total_ * (1.0 + 1e-12)) {
    throw StateError("carried residual budget outside [0, beta_total]");
  }
  residual_ = std::min(residual, total_);
}

void PacketLedger::record(double ber) {
  if (!(ber >= 0.0 && ber <= 1.0)) throw DomainError("recorded BER outside [0, 1]");
  if (terminated_) throw StateError("packet " + std::to_string(id_) + " already terminated");
  history_.push_back(ber);
  sum_ += ber;
}

double PacketLedger::avg_ber() const {
  if (history_.empty()) throw StateError("packet " + std::to_string(id_) + " has no reception");
  return sum_ / static_cast<double>(history_.size());
}

double PacketLedger::charged_ber(BudgetModel model) const {
  const double avg = avg_ber();
  return model == BudgetModel::Eq13 ? avg : avg / static_cast<double>(history_.size());
}

void PacketLedger::terminate(double consumed_loss) {
  if (terminated_) throw StateError("packet " + std::to_string(id_) + " terminated twice");
  terminated_ = true;
  consumed_ = consumed_loss;
}

}  // namespace pasar
