#include "pasar/pasar.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "pasar/errors.hpp"
#include "pasar/harness.hpp"

struct pasar_table {
  pasar::SensitivityTable table;
};

struct pasar_config {
  pasar::ExperimentConfig config;
};

struct pasar_results {
  pasar::ExperimentConfig config;
  std::vector<pasar::ResultRow> rows;
};

namespace {

thread_local std::string last_error;

pasar_status fail(pasar_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
pasar_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return PASAR_OK;
  } catch (const pasar::FormatError& e) {
    return fail(PASAR_ERR_FORMAT, e.what());
  } catch (const pasar::DomainError& e) {
    return fail(PASAR_ERR_DOMAIN, e.what());
  } catch (const pasar::ConfigError& e) {
    return fail(PASAR_ERR_CONFIG, e.what());
  } catch (const pasar::StateError& e) {
    return fail(PASAR_ERR_STATE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PASAR_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PASAR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PASAR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PASAR_ERR_INTERNAL, "unknown error");
  }
}

#define PASAR_REQUIRE(cond, what)                                   \
  do {                                                              \
    if (!(cond)) return fail(PASAR_ERR_INVALID_ARGUMENT, (what));   \
  } while (0)

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pasar_last_error(void) { return last_error.c_str(); }

const char* pasar_version(void) { return pasar::kVersion; }

const char* pasar_status_name(pasar_status status) {
  switch (status) {
    case PASAR_OK: return "ok";
    case PASAR_ERR_FORMAT: return "format error";
    case PASAR_ERR_DOMAIN: return "domain error";
    case PASAR_ERR_CONFIG: return "config error";
    case PASAR_ERR_STATE: return "state error";
    case PASAR_ERR_IO: return "i/o error";
    case PASAR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PASAR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void pasar_string_free(char* text) { std::free(text); }

pasar_status pasar_table_load(const char* path, pasar_table** out) {
  PASAR_REQUIRE(path && out, "path and out must be non-null");
  return guarded([&] { *out = new pasar_table{pasar::load_table(path)}; });
}

pasar_status pasar_table_synthesize(size_t dimension, const char* distribution, double p1,
                                    double p2, uint64_t seed, int quant_bits, pasar_table** out) {
  PASAR_REQUIRE(distribution && out, "distribution and out must be non-null");
  const std::string kind = distribution;
  pasar::Distribution dist;
  if (kind == "lognormal") {
    dist = pasar::Lognormal{p1, p2};
  } else if (kind == "exponential") {
    dist = pasar::Exponential{p1};
  } else if (kind == "constant") {
    dist = pasar::Constant{p1};
  } else {
    return fail(PASAR_ERR_INVALID_ARGUMENT, "unknown distribution '" + kind + "'");
  }
  return guarded([&] {
    *out = new pasar_table{pasar::synthesize_table(dimension, dist, seed, quant_bits)};
  });
}

pasar_status pasar_table_from_values(const double* values, size_t count, int quant_bits,
                                     pasar_table** out) {
  PASAR_REQUIRE(out && (values || count == 0), "values and out must be non-null");
  return guarded([&] {
    *out = new pasar_table{pasar::SensitivityTable(std::vector<double>(values, values + count),
                                                   "inline", quant_bits)};
  });
}

pasar_status pasar_table_prune(const pasar_table* table, double rate, pasar_table** out) {
  PASAR_REQUIRE(table && out, "table and out must be non-null");
  return guarded([&] { *out = new pasar_table{pasar::prune(table->table, rate)}; });
}

size_t pasar_table_size(const pasar_table* table) { return table ? table->table.size() : 0; }

size_t pasar_table_values(const pasar_table* table, double* buffer, size_t capacity) {
  if (!table || !buffer) return 0;
  const auto values = table->table.values();
  const size_t n = std::min(capacity, values.size());
  std::copy_n(values.begin(), n, buffer);
  return n;
}

pasar_status pasar_table_stats(const pasar_table* table, pasar_stats* out) {
  PASAR_REQUIRE(table && out, "table and out must be non-null");
  return guarded([&] {
    const auto s = pasar::stats(table->table.values());
    *out = {s.mean, s.median, s.variance, s.skewness, s.degenerate ? 1 : 0};
  });
}

pasar_status pasar_table_save_psns(const pasar_table* table, const char* path) {
  PASAR_REQUIRE(table && path, "table and path must be non-null");
  return guarded([&] { pasar::save_psns(table->table, path); });
}

pasar_status pasar_table_save_csv(const pasar_table* table, const char* path) {
  PASAR_REQUIRE(table && path, "table and path must be non-null");
  return guarded([&] { pasar::save_csv(table->table, path); });
}

void pasar_table_free(pasar_table* table) { delete table; }

pasar_status pasar_config_default(pasar_config** out) {
  PASAR_REQUIRE(out, "out must be non-null");
  return guarded([&] { *out = new pasar_config{}; });
}

pasar_status pasar_config_load(const char* path, pasar_config** out) {
  PASAR_REQUIRE(path && out, "path and out must be non-null");
  return guarded([&] { *out = new pasar_config{pasar::load_config(path)}; });
}

pasar_status pasar_config_parse(const char* json_text, pasar_config** out) {
  PASAR_REQUIRE(json_text && out, "json_text and out must be non-null");
  return guarded([&] { *out = new pasar_config{pasar::parse_config(json_text)}; });
}

pasar_status pasar_config_set_runs(pasar_config* config, int runs) {
  PASAR_REQUIRE(config, "config must be non-null");
  PASAR_REQUIRE(runs >= 1, "runs must be >= 1");
  config->config.runs = runs;
  return PASAR_OK;
}

pasar_status pasar_config_set_seed(pasar_config* config, uint64_t seed) {
  PASAR_REQUIRE(config, "config must be non-null");
  config->config.base_seed = seed;
  return PASAR_OK;
}

pasar_status pasar_config_set_output(pasar_config* config, const char* path) {
  PASAR_REQUIRE(config && path && *path, "config and a non-empty path are required");
  config->config.output_path = path;
  return PASAR_OK;
}

pasar_status pasar_config_set_schemes(pasar_config* config, const char* schemes) {
  PASAR_REQUIRE(config && schemes, "config and schemes must be non-null");
  return guarded([&] {
    std::vector<pasar::Scheme> parsed;
    std::stringstream ss(schemes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parsed.push_back(pasar::parse_scheme(item));
    }
    if (parsed.empty()) throw pasar::ConfigError("scheme list is empty");
    config->config.schemes = std::move(parsed);
  });
}

pasar_status pasar_config_set_snr_grid(pasar_config* config, const double* snr_db, size_t count) {
  PASAR_REQUIRE(config && snr_db && count > 0, "a non-empty SNR grid is required");
  config->config.snr_grid_db.assign(snr_db, snr_db + count);
  return PASAR_OK;
}

pasar_status pasar_config_set_packet_bits(pasar_config* config, const int* bits, size_t count) {
  PASAR_REQUIRE(config && bits && count > 0, "a non-empty packet-bits grid is required");
  config->config.packet_bits_grid.assign(bits, bits + count);
  return PASAR_OK;
}

pasar_status pasar_config_set_prune_rates(pasar_config* config, const double* rates, size_t count) {
  PASAR_REQUIRE(config && rates && count > 0, "a non-empty prune-rate grid is required");
  config->config.prune_rates.assign(rates, rates + count);
  return PASAR_OK;
}

pasar_status pasar_config_set_beta_total(pasar_config* config, double beta_total) {
  PASAR_REQUIRE(config, "config must be non-null");
  PASAR_REQUIRE(beta_total >= 0.0 && std::isfinite(beta_total),
                "beta_total must be finite and non-negative");
  config->config.budget.beta_total = beta_total;
  return PASAR_OK;
}

pasar_status pasar_config_set_budget_model(pasar_config* config, const char* model) {
  PASAR_REQUIRE(config && model, "config and model must be non-null");
  return guarded([&] { config->config.budget_model = pasar::parse_budget_model(model); });
}

pasar_status pasar_config_set_ber_mode(pasar_config* config, const char* mode) {
  PASAR_REQUIRE(config && mode, "config and mode must be non-null");
  return guarded([&] { config->config.ber_mode = pasar::parse_ber_mode(mode); });
}

pasar_status pasar_config_set_threads(pasar_config* config, unsigned threads) {
  PASAR_REQUIRE(config, "config must be non-null");
  config->config.threads = threads;
  return PASAR_OK;
}

const char* pasar_config_output(const pasar_config* config) {
  return config ? config->config.output_path.c_str() : "";
}

pasar_status pasar_config_validate(const pasar_config* config) {
  PASAR_REQUIRE(config, "config must be non-null");
  return guarded([&] { config->config.validate(); });
}

pasar_status pasar_config_to_json(const pasar_config* config, char** out) {
  PASAR_REQUIRE(config && out, "config and out must be non-null");
  return guarded([&] { *out = duplicate(pasar::config_to_json(config->config)); });
}

void pasar_config_free(pasar_config* config) { delete config; }

pasar_status pasar_calibrate(const pasar_config* config, double* beta_total) {
  PASAR_REQUIRE(config && beta_total, "config and beta_total must be non-null");
  return guarded([&] {
    config->config.validate();
    *beta_total = pasar::resolve_budget(config->config, pasar::load_source(config->config));
  });
}

pasar_status pasar_experiment_run(const pasar_config* config, pasar_results** out) {
  PASAR_REQUIRE(config && out, "config and out must be non-null");
  return guarded([&] {
    auto results = std::make_unique<pasar_results>();
    results->config = config->config;
    results->rows = pasar::run_experiment(config->config);
    *out = results.release();
  });
}

size_t pasar_results_count(const pasar_results* results) {
  return results ? results->rows.size() : 0;
}

pasar_status pasar_results_row(const pasar_results* results, size_t index, pasar_result_row* out) {
  PASAR_REQUIRE(results && out, "results and out must be non-null");
  PASAR_REQUIRE(index < results->rows.size(), "row index out of range");
  const auto& r = results->rows[index];
  *out = {pasar::to_string(r.scheme).data(), r.snr_db, r.packet_bits, r.prune_rate,
          r.mean_t_total, r.stddev_t_total, r.failure_rate, r.mean_realized_loss,
          r.mean_rounds, r.runs, r.packets, r.beta_total, r.budget_violations,
          r.max_consumed_fraction};
  return PASAR_OK;
}

pasar_status pasar_results_write(const pasar_results* results, const char* path) {
  PASAR_REQUIRE(results && path, "results and path must be non-null");
  const pasar_status status = guarded([&] {
    pasar::write_results_csv(results->rows, path);
    pasar::write_manifest(results->config, results->rows, std::string(path) + ".manifest.json");
  });
  return status == PASAR_ERR_FORMAT ? fail(PASAR_ERR_IO, last_error) : status;
}

pasar_status pasar_results_csv(const pasar_results* results, char** out) {
  PASAR_REQUIRE(results && out, "results and out must be non-null");
  return guarded([&] { *out = duplicate(pasar::results_csv(results->rows)); });
}

void pasar_results_free(pasar_results* results) { delete results; }

pasar_status pasar_oracle_check(size_t instances, size_t max_size, uint64_t seed,
                                pasar_oracle_report* out) {
  PASAR_REQUIRE(out, "out must be non-null");
  return guarded([&] {
    const auto r = pasar::oracle_check(instances, max_size, seed);
    *out = {r.instances, r.cardinality_matches, r.set_matches, r.budget_violations};
  });
}

}  // extern "C"
