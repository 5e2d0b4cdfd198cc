#include "pasar/controller.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pasar/errors.hpp"
#include "pasar/quantcodec.hpp"

namespace pasar {

namespace {

struct Entry {
  std::size_t id;
  double sensitivity;
  double avg_ber;
  double cost;
};

std::vector<Entry> entries_for(std::span<const PacketCost> costs, double alpha) {
  std::vector<Entry> entries;
  entries.reserve(costs.size());
  for (const auto& c : costs) {
    if (!(c.sensitivity >= 0.0)) {
      throw DomainError("packet " + std::to_string(c.id) + " has negative sensitivity");
    }
    if (!(c.avg_ber >= 0.0 && c.avg_ber <= 1.0)) {
      throw DomainError("packet " + std::to_string(c.id) + " has average BER outside [0, 1]");
    }
    entries.push_back({c.id, c.sensitivity, c.avg_ber, alpha * c.sensitivity * c.avg_ber});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
  return entries;
}

bool cheaper(const Entry& a, const Entry& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.id < b.id);
}

}  // namespace

double termination_threshold(double beta_res, double sensitivity, std::size_t active_count,
                             int width) {
  if (active_count == 0) throw DomainError("termination_threshold: empty active set");
  if (!(sensitivity >= 0.0)) throw DomainError("termination_threshold: negative sensitivity");
  if (!(beta_res >= 0.0)) throw DomainError("termination_threshold: negative residual budget");
  if (sensitivity == 0.0) return std::numeric_limits<double>::infinity();
  return beta_res / (loss_scale(width) * sensitivity * static_cast<double>(active_count));
}

RoundDecision pasar_round(const ControlState& state, std::span<const PacketCost> costs, int width) {
  if (!(state.beta_res >= 0.0)) {
    throw StateError("pasar_round: negative residual budget " + std::to_string(state.beta_res));
  }
  const double alpha = loss_scale(width);
  std::vector<Entry> entries = entries_for(costs, alpha);

  std::vector<std::size_t> active_ids = state.active;
  std::sort(active_ids.begin(), active_ids.end());
  if (active_ids.size() != entries.size() ||
      !std::equal(active_ids.begin(), active_ids.end(), entries.begin(),
                  [](std::size_t id, const Entry& e) { return id == e.id; })) {
    throw StateError("pasar_round: costs must cover exactly the active packet set");
  }

  RoundDecision decision;
  double budget = state.beta_res;
  std::vector<bool> done(entries.size(), false);
  std::vector<std::size_t> remaining(entries.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  // Phase 1: threshold filtering. Every continuing epoch removes at least one
  // packet, so more than |V| + 1 epochs means the loop is broken.
  const std::size_t epoch_cap = entries.size() + 1;
  int epoch = state.epoch;
  while (!remaining.empty()) {
    const std::size_t count = remaining.size();
    EpochTrace trace{epoch, budget, count, {}};
    double deducted = 0.0;
    for (std::size_t k : remaining) {
      const Entry& e = entries[k];
      if (e.avg_ber <= termination_threshold(budget, e.sensitivity, count, width)) {
        done[k] = true;
        trace.terminated.push_back(e.id);
        deducted += e.cost;
      }
    }
    if (trace.terminated.empty()) break;
    budget = std::max(0.0, budget - deducted);
    std::erase_if(remaining, [&](std::size_t k) { return done[k]; });
    decision.phase1.push_back(std::move(trace));
    ++decision.epochs_used;
    ++epoch;
    if (static_cast<std::size_t>(decision.epochs_used) > epoch_cap) {
      throw StateError("pasar_round: phase-1 epoch loop failed to shrink the active set");
    }
  }

  // Phase 2: greedy refinement over the survivors.
  std::sort(remaining.begin(), remaining.end(),
            [&](std::size_t a, std::size_t b) { return cheaper(entries[a], entries[b]); });
  const double slack = kBudgetSlack * std::max(state.beta_total, state.beta_res);
  double spent = 0.0;
  for (std::size_t k : remaining) {
    if (spent + entries[k].cost <= budget + slack) {
      spent += entries[k].cost;
      done[k] = true;
      decision.phase2.push_back(entries[k].id);
    } else {
      break;
    }
  }
  budget = std::max(0.0, budget - spent);

  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (done[k]) {
      decision.ack.push_back(entries[k].id);
      decision.consumed += entries[k].cost;
    } else {
      decision.nack.push_back(entries[k].id);
    }
  }
  decision.beta_res_next = budget;
  return decision;
}

double uniform_threshold(double beta_total, double total_sensitivity, int width) {
  if (!(beta_total >= 0.0)) throw DomainError("uniform_threshold: negative budget");
  if (!(total_sensitivity >= 0.0)) throw DomainError("uniform_threshold: negative sensitivity");
  if (total_sensitivity == 0.0) return std::numeric_limits<double>::infinity();
  return beta_total / (loss_scale(width) * total_sensitivity);
}

RoundDecision uniform_round(std::span<const PacketCost> costs, double beta_res,
                            double total_sensitivity, double beta_total, int width) {
  const double alpha = loss_scale(width);
  const double threshold = uniform_threshold(beta_total, total_sensitivity, width);
  RoundDecision decision;
  EpochTrace trace{1, beta_res, costs.size(), {}};
  for (const Entry& e : entries_for(costs, alpha)) {
    if (e.avg_ber <= threshold) {
      decision.ack.push_back(e.id);
      decision.consumed += e.cost;
      trace.terminated.push_back(e.id);
    } else {
      decision.nack.push_back(e.id);
    }
  }
  if (!trace.terminated.empty()) {
    decision.epochs_used = 1;
    decision.phase1.push_back(std::move(trace));
  }
  decision.beta_res_next = std::max(0.0, beta_res - decision.consumed);
  return decision;
}

std::vector<std::size_t> greedy_oracle(std::span<const double> costs, double budget) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  const double slack = kBudgetSlack * budget;
  std::vector<std::size_t> selected;
  double spent = 0.0;
  for (std::size_t k : order) {
    if (spent + costs[k] > budget + slack) break;
    spent += costs[k];
    selected.push_back(k);
  }
  return selected;
}

std::size_t brute_force_oracle(std::span<const double> costs, double budget) {
  if (costs.size() > kBruteForceLimit) {
    throw DomainError("brute_force_oracle: instance of size " + std::to_string(costs.size()) +
                      " exceeds the exhaustive limit of 20");
  }
  const std::size_t n = costs.size();
  std::size_t best = 0;
  for (std::uint32_t subset = 0; subset < (std::uint32_t{1} << n); ++subset) {
    const auto size = static_cast<std::size_t>(std::popcount(subset));
    if (size <= best) continue;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (subset & (std::uint32_t{1} << k)) sum += costs[k];
    }
    if (sum <= budget) best = size;
  }
  return best;
}

}  // namespace pasar
