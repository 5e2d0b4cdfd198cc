#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pasar {

// Relative slack applied to budget comparisons (times beta_total).
inline constexpr double kBudgetSlack = 1e-12;

struct PacketCost {
  std::size_t id = 0;
  double sensitivity = 0.0;  // s_j
  double avg_ber = 0.0;      // running average BER charged for the packet
};

struct ControlState {
  std::vector<std::size_t> active;
  double beta_res = 0.0;
  double beta_total = 0.0;  // scales the comparison slack
  int epoch = 1;
};

// One Phase-1 threshold epoch, kept for replay checks.
struct EpochTrace {
  int epoch = 1;
  double beta_res = 0.0;
  std::size_t active_count = 0;
  std::vector<std::size_t> terminated;
};

struct RoundDecision {
  std::vector<std::size_t> ack;   // ascending packet id
  std::vector<std::size_t> nack;  // ascending packet id
  double beta_res_next = 0.0;
  double consumed = 0.0;          // sum of ack costs
  int epochs_used = 0;            // Phase-1 epochs that terminated something
  std::vector<EpochTrace> phase1;
  std::vector<std::size_t> phase2;  // in selection order
};

// beta_res / (alpha(n) * s * active_count); +inf when s == 0.
double termination_threshold(double beta_res, double sensitivity, std::size_t active_count,
                             int width);

// Two-phase on-device stopping control for one round. `costs` must hold
// exactly one entry per id in state.active.
RoundDecision pasar_round(const ControlState& state, std::span<const PacketCost> costs,
                          int width);

// beta_total / (alpha(n) * total_sensitivity); +inf when the total is 0.
double uniform_threshold(double beta_total, double total_sensitivity, int width);

// Fixed-threshold rule of the HARQ baselines. `total_sensitivity` is the sum
// over all J packets, not just the active ones. beta_res only feeds the
// bookkeeping in the returned decision.
RoundDecision uniform_round(std::span<const PacketCost> costs, double beta_res,
                            double total_sensitivity, double beta_total, int width);

// Sorting-based greedy: ascending cost, ties by index, maximal affordable
// prefix. Returns selected indices in selection order.
std::vector<std::size_t> greedy_oracle(std::span<const double> costs, double budget);

inline constexpr std::size_t kBruteForceLimit = 20;

// Exhaustive maximum cardinality of an affordable subset (|costs| <= 20).
std::size_t brute_force_oracle(std::span<const double> costs, double budget);

}  // namespace pasar
