#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pasar/channel.hpp"
#include "pasar/lossmodel.hpp"
#include "pasar/protocol.hpp"
#include "pasar/sensitivity.hpp"

namespace pasar {

struct SensitivitySource {
  std::optional<std::filesystem::path> path;  // wins over the synthetic distribution
  Distribution distribution = Lognormal{};
  std::size_t dimension = 12500;
  std::uint64_t seed = 1;
};

// Either an explicit beta_total, or target_fraction times the one-shot
// expected loss of the unpruned table at reference_snr_db (default: the
// lowest grid SNR minus 5 dB). The resolved budget is held fixed across the
// SNR, packet-size and prune grids.
struct BudgetSpec {
  std::optional<double> beta_total;
  double target_fraction = 1.0;
  std::optional<double> reference_snr_db;
};

struct ModulationSpec {
  int modulation_order = 4;
  double code_rate = 0.5;
  std::optional<double> coding_gain_db;  // overrides the table
  CodingGainTable coding_gain_table = default_coding_gain_table();

  double gain_db() const;
};

struct ExperimentConfig {
  SensitivitySource source{};
  int quant_bits = 8;
  std::vector<Scheme> schemes{Scheme::Pasar, Scheme::HarqI, Scheme::HarqCc, Scheme::HarqIr};
  std::vector<double> snr_grid_db{-5.0, 0.0, 5.0, 10.0};
  std::vector<int> packet_bits_grid{1000};
  std::vector<double> prune_rates{0.0};
  ModulationSpec modulation{};
  BudgetSpec budget{};
  std::int64_t t_max = kDefaultTransmissionLimit;
  int runs = 500;
  std::uint64_t base_seed = 1;
  BudgetModel budget_model = BudgetModel::Eq13;
  BerMode ber_mode = BerMode::Analytic;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_path = "results.csv";

  void validate() const;
  McsConfig mcs_for(int packet_bits) const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct ResultRow {
  Scheme scheme = Scheme::Pasar;
  double snr_db = 0.0;
  int packet_bits = 0;
  double prune_rate = 0.0;
  double mean_t_total = 0.0;
  double stddev_t_total = 0.0;
  double failure_rate = 0.0;
  double mean_realized_loss = 0.0;
  double mean_rounds = 0.0;
  int runs = 0;

  // Not part of the CSV; surfaced in the manifest.
  std::size_t packets = 0;
  double beta_total = 0.0;
  std::size_t budget_violations = 0;
  double max_consumed_fraction = 0.0;  // max over runs of consumed / beta_total
};

// The session seed of run r is derive_seed(base_seed, r), shared by every
// grid point so schemes are compared on common random numbers.
std::uint64_t session_seed(std::uint64_t base_seed, std::size_t run_index) noexcept;

SensitivityTable load_source(const ExperimentConfig& config);

// target_fraction * alpha * sum(H) * E[BER] at the channel's average SNR.
double calibrate_budget(const SensitivityTable& table, const McsConfig& mcs,
                        const ChannelConfig& channel, double target_fraction);

// Resolves the BudgetSpec against the unpruned table.
double resolve_budget(const ExperimentConfig& config, const SensitivityTable& table);

// Grid order: packet_bits, prune_rate, snr, scheme (scheme fastest).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const SensitivityTable& table);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::string results_csv(const std::vector<ResultRow>& rows);
void write_manifest(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path);

struct ReductionRow {
  Scheme scheme = Scheme::Pasar;
  Scheme baseline = Scheme::HarqI;
  double snr_db = 0.0;
  int packet_bits = 0;
  double prune_rate = 0.0;
  double percent = 0.0;  // 100 * (baseline - scheme) / baseline
};

double latency_reduction(double scheme_latency, double baseline_latency);

// Pairs rows position by position; DomainError when grid points differ.
std::vector<ReductionRow> latency_reduction(const std::vector<ResultRow>& scheme_rows,
                                            const std::vector<ResultRow>& baseline_rows);

struct OracleReport {
  std::size_t instances = 0;
  std::size_t cardinality_matches = 0;
  std::size_t set_matches = 0;
  std::size_t budget_violations = 0;
};

// Random knapsack instances: costs U[0,1], budget U[0, sum c], |V| in [1, max_size],
// each checked against greedy_oracle and brute_force_oracle.
OracleReport oracle_check(std::size_t instances, std::size_t max_size, std::uint64_t seed);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pasar
