/* C interface to the PASAR retransmission simulator. */
#ifndef PASAR_PASAR_H
#define PASAR_PASAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(PASAR_BUILDING_LIBRARY)
#define PASAR_API __attribute__((visibility("default")))
#else
#define PASAR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pasar_status {
  PASAR_OK = 0,
  PASAR_ERR_FORMAT = 1,
  PASAR_ERR_DOMAIN = 2,
  PASAR_ERR_CONFIG = 3,
  PASAR_ERR_STATE = 4,
  PASAR_ERR_IO = 5,
  PASAR_ERR_INVALID_ARGUMENT = 6,
  PASAR_ERR_INTERNAL = 7
} pasar_status;

typedef struct pasar_table pasar_table;
typedef struct pasar_config pasar_config;
typedef struct pasar_results pasar_results;

typedef struct pasar_stats {
  double mean;
  double median;
  double variance;
  double skewness;
  int degenerate;
} pasar_stats;

typedef struct pasar_result_row {
  const char* scheme; /* static string, valid for the life of the process */
  double snr_db;
  int packet_bits;
  double prune_rate;
  double mean_t_total;
  double stddev_t_total;
  double failure_rate;
  double mean_realized_loss;
  double mean_rounds;
  int runs;
  size_t packets;
  double beta_total;
  size_t budget_violations;
  double max_consumed_fraction;
} pasar_result_row;

typedef struct pasar_oracle_report {
  size_t instances;
  size_t cardinality_matches;
  size_t set_matches;
  size_t budget_violations;
} pasar_oracle_report;

/* Message of the last failed call on this thread; never NULL. */
PASAR_API const char* pasar_last_error(void);
PASAR_API const char* pasar_version(void);
PASAR_API const char* pasar_status_name(pasar_status status);

/* Strings returned through char** out-parameters are released with this. */
PASAR_API void pasar_string_free(char* text);

/* Sensitivity tables. Accepts the binary PSNS format or index,sensitivity CSV. */
PASAR_API pasar_status pasar_table_load(const char* path, pasar_table** out);
/* distribution: "lognormal" (p1 = mu, p2 = sigma), "exponential" (p1 = lambda),
   "constant" (p1 = value). */
PASAR_API pasar_status pasar_table_synthesize(size_t dimension, const char* distribution,
                                              double p1, double p2, uint64_t seed,
                                              int quant_bits, pasar_table** out);
PASAR_API pasar_status pasar_table_from_values(const double* values, size_t count, int quant_bits,
                                               pasar_table** out);
PASAR_API pasar_status pasar_table_prune(const pasar_table* table, double rate,
                                         pasar_table** out);
PASAR_API size_t pasar_table_size(const pasar_table* table);
/* Copies min(capacity, size) values. */
PASAR_API size_t pasar_table_values(const pasar_table* table, double* buffer, size_t capacity);
PASAR_API pasar_status pasar_table_stats(const pasar_table* table, pasar_stats* out);
PASAR_API pasar_status pasar_table_save_psns(const pasar_table* table, const char* path);
PASAR_API pasar_status pasar_table_save_csv(const pasar_table* table, const char* path);
PASAR_API void pasar_table_free(pasar_table* table);

/* Experiment configuration. */
PASAR_API pasar_status pasar_config_default(pasar_config** out);
PASAR_API pasar_status pasar_config_load(const char* path, pasar_config** out);
PASAR_API pasar_status pasar_config_parse(const char* json_text, pasar_config** out);
PASAR_API pasar_status pasar_config_set_runs(pasar_config* config, int runs);
PASAR_API pasar_status pasar_config_set_seed(pasar_config* config, uint64_t seed);
PASAR_API pasar_status pasar_config_set_output(pasar_config* config, const char* path);
/* Comma-separated scheme names, e.g. "pasar,harq-i". */
PASAR_API pasar_status pasar_config_set_schemes(pasar_config* config, const char* schemes);
PASAR_API pasar_status pasar_config_set_snr_grid(pasar_config* config, const double* snr_db,
                                                 size_t count);
PASAR_API pasar_status pasar_config_set_packet_bits(pasar_config* config, const int* bits,
                                                    size_t count);
PASAR_API pasar_status pasar_config_set_prune_rates(pasar_config* config, const double* rates,
                                                    size_t count);
PASAR_API pasar_status pasar_config_set_beta_total(pasar_config* config, double beta_total);
PASAR_API pasar_status pasar_config_set_budget_model(pasar_config* config, const char* model);
PASAR_API pasar_status pasar_config_set_ber_mode(pasar_config* config, const char* mode);
PASAR_API pasar_status pasar_config_set_threads(pasar_config* config, unsigned threads);
/* Result CSV path; valid until the config is modified or freed. */
PASAR_API const char* pasar_config_output(const pasar_config* config);
PASAR_API pasar_status pasar_config_validate(const pasar_config* config);
PASAR_API pasar_status pasar_config_to_json(const pasar_config* config, char** out);
PASAR_API void pasar_config_free(pasar_config* config);

/* Budget the configuration resolves to against its own sensitivity source. */
PASAR_API pasar_status pasar_calibrate(const pasar_config* config, double* beta_total);

/* Runs the full grid. */
PASAR_API pasar_status pasar_experiment_run(const pasar_config* config, pasar_results** out);
PASAR_API size_t pasar_results_count(const pasar_results* results);
PASAR_API pasar_status pasar_results_row(const pasar_results* results, size_t index,
                                         pasar_result_row* out);
/* Writes the CSV to path and the manifest to path + ".manifest.json". */
PASAR_API pasar_status pasar_results_write(const pasar_results* results, const char* path);
PASAR_API pasar_status pasar_results_csv(const pasar_results* results, char** out);
PASAR_API void pasar_results_free(pasar_results* results);

PASAR_API pasar_status pasar_oracle_check(size_t instances, size_t max_size, uint64_t seed,
                                          pasar_oracle_report* out);

#ifdef __cplusplus
}
#endif

#endif
