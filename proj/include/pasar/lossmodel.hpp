#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pasar {

class SensitivityTable;

// How a terminated packet is charged against the loss budget.
//   eq13:     alpha * s_j * avgBER
//   averaged: alpha * s_j * avgBER / T_j (credits the averaging combiner)
enum class BudgetModel { Eq13, Averaged };
std::string_view to_string(BudgetModel model) noexcept;
BudgetModel parse_budget_model(std::string_view text);

double average_ber(std::span<const double> history);

// loss_scale(n) * s * avg_ber
double packet_loss(double sensitivity, double avg_ber, int width);

struct PacketBer {
  double sensitivity = 0.0;
  double ber = 0.0;
};

// alpha * sum_j s_j P_j
double predicted_model_loss(std::span<const PacketBer> packets, int width);

// Element-wise mean of the received copies of one packet.
std::vector<double> combine_receptions(const std::vector<std::vector<std::int64_t>>& copies);

// 1/2 sum_d H_dd (assembled_d - original_d)^2
double realized_model_loss(const SensitivityTable& table, std::span<const std::int64_t> original,
                           std::span<const double> assembled);

class BudgetState {
 public:
  explicit BudgetState(double beta_total);

  double total() const noexcept { return total_; }
  double residual() const noexcept { return residual_; }
  double consumed() const noexcept { return consumed_; }

  // Deducts a terminated packet's loss. The residual is clamped at zero;
  // DomainError on a negative amount.
  void charge(double amount);
  // Adopts the residual the controller carries into the next round.
  void carry(double residual);

 private:
  double total_;
  double residual_;
  double consumed_ = 0.0;
};

// Per-packet BER record on the device.
class PacketLedger {
 public:
  explicit PacketLedger(std::size_t packet_id = 0) : id_(packet_id) {}

  void record(double ber);
  std::size_t id() const noexcept { return id_; }
  std::size_t attempts() const noexcept { return history_.size(); }
  double avg_ber() const;
  std::span<const double> history() const noexcept { return history_; }

  // BER fed to the stopping rule under the chosen budget model.
  double charged_ber(BudgetModel model) const;

  void terminate(double consumed_loss);
  bool terminated() const noexcept { return terminated_; }
  double consumed_loss() const noexcept { return consumed_; }

 private:
  std::size_t id_;
  std::vector<double> history_;
  double sum_ = 0.0;
  bool terminated_ = false;
  double consumed_ = 0.0;
};

}  // namespace pasar
