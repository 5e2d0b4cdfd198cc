#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pasar/pasar.h"

namespace {

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> output;
  std::vector<std::string> schemes;
  std::vector<double> snr_db;
  std::vector<int> packet_bits;
  std::vector<double> prune_rates;
  std::optional<double> budget;
  std::optional<std::string> budget_model;
  std::optional<std::string> ber_mode;
  std::optional<unsigned> threads;
};

int report(pasar_status status, const char* what) {
  std::fprintf(stderr, "pasar-cli: %s: %s: %s\n", what, pasar_status_name(status), pasar_last_error());
  return static_cast<int>(status);
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed for the Monte Carlo runs");
  cmd->add_option("--runs", o.runs, "Sessions per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--output", o.output, "Result CSV path");
  cmd->add_option("--scheme", o.schemes, "Schemes: pasar, harq-i, harq-cc, harq-ir")->delimiter(',');
  cmd->add_option("--snr-db", o.snr_db, "Average SNR grid in dB")->delimiter(',');
  cmd->add_option("--packet-bits", o.packet_bits, "Packet payload grid in bits")->delimiter(',');
  cmd->add_option("--prune-rate", o.prune_rates, "Pruning-rate grid")->delimiter(',');
  cmd->add_option("--budget", o.budget, "Explicit loss budget beta_total");
  cmd->add_option("--budget-model", o.budget_model, "eq13 or averaged")
      ->check(CLI::IsMember({"eq13", "averaged"}));
  cmd->add_option("--ber-mode", o.ber_mode, "analytic or empirical")
      ->check(CLI::IsMember({"analytic", "empirical"}));
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

// Loads the config (or defaults) and applies command-line overrides.
pasar_status build_config(const std::string& path, const Overrides& o, pasar_config** out) {
  pasar_status st = path.empty() ? pasar_config_default(out) : pasar_config_load(path.c_str(), out);
  if (st != PASAR_OK) return st;
  pasar_config* c = *out;
  if (o.seed && (st = pasar_config_set_seed(c, *o.seed)) != PASAR_OK) return st;
  if (o.runs && (st = pasar_config_set_runs(c, *o.runs)) != PASAR_OK) return st;
  if (o.output && (st = pasar_config_set_output(c, o.output->c_str())) != PASAR_OK) return st;
  if (!o.schemes.empty()) {
    std::string joined;
    for (const auto& s : o.schemes) joined += s + ",";
    if ((st = pasar_config_set_schemes(c, joined.c_str())) != PASAR_OK) return st;
  }
  if (!o.snr_db.empty() &&
      (st = pasar_config_set_snr_grid(c, o.snr_db.data(), o.snr_db.size())) != PASAR_OK) {
    return st;
  }
  if (!o.packet_bits.empty() &&
      (st = pasar_config_set_packet_bits(c, o.packet_bits.data(), o.packet_bits.size())) != PASAR_OK) {
    return st;
  }
  if (!o.prune_rates.empty() &&
      (st = pasar_config_set_prune_rates(c, o.prune_rates.data(), o.prune_rates.size())) != PASAR_OK) {
    return st;
  }
  if (o.budget && (st = pasar_config_set_beta_total(c, *o.budget)) != PASAR_OK) return st;
  if (o.budget_model && (st = pasar_config_set_budget_model(c, o.budget_model->c_str())) != PASAR_OK) {
    return st;
  }
  if (o.ber_mode && (st = pasar_config_set_ber_mode(c, o.ber_mode->c_str())) != PASAR_OK) return st;
  if (o.threads && (st = pasar_config_set_threads(c, *o.threads)) != PASAR_OK) return st;
  return pasar_config_validate(c);
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  pasar_config* config = nullptr;
  if (pasar_status st = build_config(config_path, o, &config); st != PASAR_OK) {
    pasar_config_free(config);
    return report(st, "config");
  }
  const std::string output = pasar_config_output(config);
  pasar_results* results = nullptr;
  pasar_status st = pasar_experiment_run(config, &results);
  pasar_config_free(config);
  if (st != PASAR_OK) return report(st, "run");

  std::printf("%-8s %7s %6s %6s %12s %10s %8s %12s\n", "scheme", "snr_db", "bits", "prune",
              "mean_T", "stddev_T", "fail", "loss");
  for (size_t k = 0; k < pasar_results_count(results); ++k) {
    pasar_result_row r;
    pasar_results_row(results, k, &r);
    std::printf("%-8s %7.2f %6d %6.3f %12.3f %10.3f %8.4f %12.6g\n", r.scheme, r.snr_db,
                r.packet_bits, r.prune_rate, r.mean_t_total, r.stddev_t_total, r.failure_rate,
                r.mean_realized_loss);
  }
  st = pasar_results_write(results, output.c_str());
  pasar_results_free(results);
  if (st != PASAR_OK) return report(st, "write");
  std::printf("wrote %s and %s.manifest.json\n", output.c_str(), output.c_str());
  return 0;
}

int cmd_stats(const std::string& path) {
  pasar_table* table = nullptr;
  if (pasar_status st = pasar_table_load(path.c_str(), &table); st != PASAR_OK) {
    return report(st, "stats");
  }
  pasar_stats s;
  const pasar_status st = pasar_table_stats(table, &s);
  const size_t d = pasar_table_size(table);
  pasar_table_free(table);
  if (st != PASAR_OK) return report(st, "stats");
  std::printf("dimension  %zu\nmean       %.10g\nmedian     %.10g\nvariance   %.10g\n"
              "skewness   %.10g\ndegenerate %s\n",
              d, s.mean, s.median, s.variance, s.skewness, s.degenerate ? "yes" : "no");
  return 0;
}

int cmd_calibrate(const std::string& config_path, const Overrides& o) {
  pasar_config* config = nullptr;
  pasar_status st = build_config(config_path, o, &config);
  double beta = 0.0;
  if (st == PASAR_OK) st = pasar_calibrate(config, &beta);
  pasar_config_free(config);
  if (st != PASAR_OK) return report(st, "calibrate");
  std::printf("beta_total %.17g\n", beta);
  return 0;
}

int cmd_oracle(size_t instances, size_t max_size, uint64_t seed) {
  pasar_oracle_report r;
  if (pasar_status st = pasar_oracle_check(instances, max_size, seed, &r); st != PASAR_OK) {
    return report(st, "oracle-check");
  }
  std::printf("instances            %zu\ncardinality matches  %zu\nset matches          %zu\n"
              "budget violations    %zu\n",
              r.instances, r.cardinality_matches, r.set_matches, r.budget_violations);
  const bool ok = r.cardinality_matches == r.instances && r.set_matches == r.instances &&
                  r.budget_violations == 0;
  std::printf("%s\n", ok ? "OK" : "MISMATCH");
  return ok ? 0 : static_cast<int>(PASAR_ERR_INTERNAL);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PASAR retransmission simulator"};
  app.set_version_flag("--version", pasar_version());
  app.require_subcommand(1);

  std::string run_config, calib_config, sens_path;
  Overrides run_o, calib_o;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo latency sweep");
  run->add_option("--config", run_config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  add_overrides(run, run_o);

  auto* stats = app.add_subcommand("stats", "Summary statistics of a sensitivity table");
  stats->add_option("--sensitivity", sens_path, "PSNS or CSV table")->required()->check(CLI::ExistingFile);

  auto* calib = app.add_subcommand("calibrate", "Print the loss budget a config resolves to");
  calib->add_option("--config", calib_config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  add_overrides(calib, calib_o);

  size_t instances = 1000, max_size = 12;
  uint64_t oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle-check", "Compare the controller with exact knapsack oracles");
  oracle->add_option("--instances", instances, "Random instances")->check(CLI::PositiveNumber);
  oracle->add_option("--max-size", max_size, "Largest packet set (<= 20)")->check(CLI::Range(1, 20));
  oracle->add_option("--seed", oracle_seed, "Instance seed");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(run_config, run_o);
  if (*stats) return cmd_stats(sens_path);
  if (*calib) return cmd_calibrate(calib_config, calib_o);
  return cmd_oracle(instances, max_size, oracle_seed);
}
