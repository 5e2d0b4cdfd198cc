#include "pasar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "pasar/controller.hpp"
#include "pasar/errors.hpp"
#include "pasar/quantcodec.hpp"
#include "pasar/rng.hpp"

namespace pasar {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Distribution parse_distribution(const json& j) {
  const std::string kind = j.value("distribution", "lognormal");
  if (kind == "lognormal") return Lognormal{j.value("mu", 0.0), j.value("sigma", 1.2)};
  if (kind == "exponential") return Exponential{j.value("lambda", 1.0)};
  if (kind == "constant") return Constant{j.value("value", 1.0)};
  throw ConfigError("unknown sensitivity distribution '" + kind + "'");
}

json distribution_json(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Lognormal>) {
          return {{"distribution", "lognormal"}, {"mu", d.mu}, {"sigma", d.sigma}};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {{"distribution", "exponential"}, {"lambda", d.lambda}};
        } else {
          return {{"distribution", "constant"}, {"value", d.value}};
        }
      },
      dist);
}

struct RunSummary {
  std::int64_t t_total = 0;
  bool success = false;
  double realized_loss = 0.0;
  double consumed = 0.0;
  std::size_t rounds = 0;
};

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(r) for r in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t r = next++; r < count; r = next++) {
          try {
            body(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double ModulationSpec::gain_db() const {
  return coding_gain_db ? *coding_gain_db : coding_gain_for(coding_gain_table, code_rate);
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (schemes.empty()) throw ConfigError("scheme list is empty");
  if (snr_grid_db.empty()) throw ConfigError("SNR grid is empty");
  if (packet_bits_grid.empty()) throw ConfigError("packet-bits grid is empty");
  if (prune_rates.empty()) throw ConfigError("prune-rate grid is empty");
  if (quant_bits < kMinQuantBits || quant_bits > kMaxQuantBits) {
    throw ConfigError("quant_bits must lie in [2, 32]");
  }
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  for (double rate : prune_rates) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("prune rates must lie in [0, 1)");
  }
  for (double snr : snr_grid_db) {
    if (std::isnan(snr)) throw ConfigError("SNR grid holds NaN");
  }
  if (budget.beta_total) {
    if (!(*budget.beta_total >= 0.0) || !std::isfinite(*budget.beta_total)) {
      throw ConfigError("beta_total must be finite and non-negative");
    }
  } else if (!(budget.target_fraction > 0.0 && budget.target_fraction <= 1.0)) {
    throw ConfigError("budget target_fraction must lie in (0, 1]");
  }
  if (!source.path && source.dimension == 0) throw ConfigError("synthetic dimension must be >= 1");
  for (int bits : packet_bits_grid) mcs_for(bits);
}

McsConfig ExperimentConfig::mcs_for(int packet_bits) const {
  return mcs_for_payload(packet_bits, modulation.modulation_order, modulation.code_rate,
                         modulation.gain_db(), quant_bits);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  ExperimentConfig cfg;
  try {
    reject_unknown_keys(root,
                        {"sensitivity", "quant_bits", "schemes", "snr_grid_db", "packet_bits_grid",
                         "prune_rates", "modulation", "budget", "t_max", "runs", "base_seed",
                         "budget_model", "ber_mode", "threads", "output"},
                        "config");
    if (root.contains("sensitivity")) {
      const json& s = root["sensitivity"];
      reject_unknown_keys(s, {"path", "distribution", "mu", "sigma", "lambda", "value", "dimension", "seed"},
                          "sensitivity");
      if (s.contains("path")) cfg.source.path = s["path"].get<std::string>();
      cfg.source.distribution = parse_distribution(s);
      cfg.source.dimension = s.value("dimension", cfg.source.dimension);
      cfg.source.seed = s.value("seed", cfg.source.seed);
    }
    cfg.quant_bits = root.value("quant_bits", cfg.quant_bits);
    if (root.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto& s : root["schemes"]) cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    cfg.snr_grid_db = root.value("snr_grid_db", cfg.snr_grid_db);
    cfg.packet_bits_grid = root.value("packet_bits_grid", cfg.packet_bits_grid);
    cfg.prune_rates = root.value("prune_rates", cfg.prune_rates);
    if (root.contains("modulation")) {
      const json& m = root["modulation"];
      reject_unknown_keys(m, {"order", "code_rate", "coding_gain_db", "coding_gain_table"}, "modulation");
      cfg.modulation.modulation_order = m.value("order", cfg.modulation.modulation_order);
      cfg.modulation.code_rate = m.value("code_rate", cfg.modulation.code_rate);
      if (m.contains("coding_gain_db")) cfg.modulation.coding_gain_db = m["coding_gain_db"].get<double>();
      if (m.contains("coding_gain_table")) {
        cfg.modulation.coding_gain_table.clear();
        for (const auto& [rate, gain] : m["coding_gain_table"].items()) {
          const auto slash = rate.find('/');
          const double r = slash == std::string::npos
                               ? std::stod(rate)
                               : std::stod(rate.substr(0, slash)) / std::stod(rate.substr(slash + 1));
          cfg.modulation.coding_gain_table[r] = gain.get<double>();
        }
      }
    }
    if (root.contains("budget")) {
      const json& b = root["budget"];
      reject_unknown_keys(b, {"beta_total", "target_fraction", "reference_snr_db"}, "budget");
      if (b.contains("beta_total")) cfg.budget.beta_total = b["beta_total"].get<double>();
      cfg.budget.target_fraction = b.value("target_fraction", cfg.budget.target_fraction);
      if (b.contains("reference_snr_db")) cfg.budget.reference_snr_db = b["reference_snr_db"].get<double>();
    }
    cfg.t_max = root.value("t_max", cfg.t_max);
    cfg.runs = root.value("runs", cfg.runs);
    cfg.base_seed = root.value("base_seed", cfg.base_seed);
    if (root.contains("budget_model")) cfg.budget_model = parse_budget_model(root["budget_model"].get<std::string>());
    if (root.contains("ber_mode")) cfg.ber_mode = parse_ber_mode(root["ber_mode"].get<std::string>());
    cfg.threads = root.value("threads", cfg.threads);
    if (root.contains("output")) cfg.output_path = root["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("config value unparsable: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg = parse_config(buffer.str());
  if (cfg.source.path && cfg.source.path->is_relative()) {
    cfg.source.path = path.parent_path() / *cfg.source.path;
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json root;
  json sens = distribution_json(cfg.source.distribution);
  sens["dimension"] = cfg.source.dimension;
  sens["seed"] = cfg.source.seed;
  if (cfg.source.path) sens["path"] = cfg.source.path->string();
  root["sensitivity"] = sens;
  root["quant_bits"] = cfg.quant_bits;
  root["schemes"] = json::array();
  for (Scheme s : cfg.schemes) root["schemes"].push_back(std::string(to_string(s)));
  root["snr_grid_db"] = cfg.snr_grid_db;
  root["packet_bits_grid"] = cfg.packet_bits_grid;
  root["prune_rates"] = cfg.prune_rates;
  json mod{{"order", cfg.modulation.modulation_order}, {"code_rate", cfg.modulation.code_rate}};
  if (cfg.modulation.coding_gain_db) mod["coding_gain_db"] = *cfg.modulation.coding_gain_db;
  json table = json::object();
  for (const auto& [rate, gain] : cfg.modulation.coding_gain_table) table[format_number(rate)] = gain;
  mod["coding_gain_table"] = table;
  root["modulation"] = mod;
  json budget = json::object();
  if (cfg.budget.beta_total) {
    budget["beta_total"] = *cfg.budget.beta_total;
  } else {
    budget["target_fraction"] = cfg.budget.target_fraction;
    if (cfg.budget.reference_snr_db) budget["reference_snr_db"] = *cfg.budget.reference_snr_db;
  }
  root["budget"] = budget;
  root["t_max"] = cfg.t_max;
  root["runs"] = cfg.runs;
  root["base_seed"] = cfg.base_seed;
  root["budget_model"] = std::string(to_string(cfg.budget_model));
  root["ber_mode"] = std::string(to_string(cfg.ber_mode));
  root["threads"] = cfg.threads;
  root["output"] = cfg.output_path.string();
  return root.dump(2);
}

std::uint64_t session_seed(std::uint64_t base_seed, std::size_t run_index) noexcept {
  return derive_seed(base_seed, run_index);
}

SensitivityTable load_source(const ExperimentConfig& config) {
  if (config.source.path) return load_table(*config.source.path);
  return synthesize_table(config.source.dimension, config.source.distribution, config.source.seed,
                          config.quant_bits);
}

double calibrate_budget(const SensitivityTable& table, const McsConfig& mcs,
                        const ChannelConfig& channel, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw DomainError("target_fraction must lie in (0, 1]");
  }
  ChannelConfig reference = channel;
  reference.mcs = mcs;
  const double one_shot_ber = expected_ber(reference);
  return target_fraction * loss_scale(mcs.quant_bits) * table.total() * one_shot_ber;
}

double resolve_budget(const ExperimentConfig& config, const SensitivityTable& table) {
  if (config.budget.beta_total) return *config.budget.beta_total;
  const double lowest = *std::min_element(config.snr_grid_db.begin(), config.snr_grid_db.end());
  ChannelConfig reference;
  reference.avg_snr_db = config.budget.reference_snr_db.value_or(lowest - 5.0);
  reference.mcs = config.mcs_for(config.packet_bits_grid.front());
  return calibrate_budget(table, reference.mcs, reference, config.budget.target_fraction);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_source(config));
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, const SensitivityTable& table) {
  config.validate();
  const double beta_total = resolve_budget(config, table);
  const unsigned threads = resolve_threads(config.threads);
  const auto runs = static_cast<std::size_t>(config.runs);

  std::vector<ResultRow> rows;
  for (int bits : config.packet_bits_grid) {
    McsConfig mcs = config.mcs_for(bits);
    for (double rate : config.prune_rates) {
      const SensitivityTable pruned = prune(table, rate);
      const std::size_t num_packets = packetize(pruned, mcs).size();
      std::vector<std::vector<std::int64_t>> originals(runs);
      parallel_for(runs, threads, [&](std::size_t r) {
        originals[r] = draw_original_params(pruned.size(), config.quant_bits,
                                            session_seed(config.base_seed, r));
      });

      for (double snr : config.snr_grid_db) {
        for (Scheme scheme : config.schemes) {
          SessionConfig session;
          session.scheme = scheme;
          session.beta_total = beta_total;
          session.t_max = config.t_max;
          session.channel = {snr, mcs};
          session.budget_model = config.budget_model;
          session.ber_mode = config.ber_mode;

          std::vector<RunSummary> summaries(runs);
          parallel_for(runs, threads, [&](std::size_t r) {
            SessionConfig local = session;
            local.seed = session_seed(config.base_seed, r);
            const SessionResult res = run_session(local, pruned, originals[r]);
            summaries[r] = {res.t_total, res.success, res.realized_loss,
                            res.predicted_loss_consumed, res.rounds};
          });

          // Reduce in run order so the output does not depend on scheduling.
          ResultRow row;
          row.scheme = scheme;
          row.snr_db = snr;
          row.packet_bits = bits;
          row.prune_rate = rate;
          row.runs = config.runs;
          row.packets = num_packets;
          row.beta_total = beta_total;
          double sum_t = 0.0, sum_t2 = 0.0, sum_loss = 0.0, sum_rounds = 0.0;
          std::size_t failures = 0;
          for (const auto& s : summaries) {
            const auto t = static_cast<double>(s.t_total);
            sum_t += t;
            sum_t2 += t * t;
            sum_loss += s.realized_loss;
            sum_rounds += static_cast<double>(s.rounds);
            if (!s.success) ++failures;
            if (s.consumed > beta_total * (1.0 + 1e-9)) ++row.budget_violations;
            if (beta_total > 0.0) {
              row.max_consumed_fraction = std::max(row.max_consumed_fraction, s.consumed / beta_total);
            }
          }
          const auto n = static_cast<double>(runs);
          row.mean_t_total = sum_t / n;
          row.stddev_t_total =
              runs > 1 ? std::sqrt(std::max(0.0, (sum_t2 - sum_t * sum_t / n) / (n - 1.0))) : 0.0;
          row.failure_rate = static_cast<double>(failures) / n;
          row.mean_realized_loss = sum_loss / n;
          row.mean_rounds = sum_rounds / n;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "scheme,snr_db,packet_bits,prune_rate,mean_t_total,stddev_t_total,failure_rate,"
        "mean_realized_loss,mean_rounds,runs\n";
  for (const auto& r : rows) {
    os << to_string(r.scheme) << ',' << format_number(r.snr_db) << ',' << r.packet_bits << ','
       << format_number(r.prune_rate) << ',' << format_number(r.mean_t_total) << ','
       << format_number(r.stddev_t_total) << ',' << format_number(r.failure_rate) << ','
       << format_number(r.mean_realized_loss) << ',' << format_number(r.mean_rounds) << ','
       << r.runs << '\n';
  }
  return os.str();
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write results to " + path.string());
  out << results_csv(rows);
}

void write_manifest(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path) {
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = json::parse(config_to_json(config));
  manifest["seed_derivation"] = "session seed of run r = splitmix64 mix of (base_seed, r)";
  json seeds = json::array();
  for (int r = 0; r < config.runs; ++r) seeds.push_back(session_seed(config.base_seed, static_cast<std::size_t>(r)));
  manifest["rows"] = json::array();
  for (const auto& r : rows) {
    manifest["rows"].push_back({{"scheme", std::string(to_string(r.scheme))},
                                {"snr_db", r.snr_db},
                                {"packet_bits", r.packet_bits},
                                {"prune_rate", r.prune_rate},
                                {"packets", r.packets},
                                {"beta_total", r.beta_total},
                                {"budget_violations", r.budget_violations},
                                {"max_consumed_fraction", r.max_consumed_fraction},
                                {"session_seeds", seeds}});
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write manifest to " + path.string());
  out << manifest.dump(2) << '\n';
}

double latency_reduction(double scheme_latency, double baseline_latency) {
  if (!(baseline_latency > 0.0)) throw DomainError("baseline latency must be positive");
  return 100.0 * (baseline_latency - scheme_latency) / baseline_latency;
}

std::vector<ReductionRow> latency_reduction(const std::vector<ResultRow>& scheme_rows,
                                            const std::vector<ResultRow>& baseline_rows) {
  if (scheme_rows.size() != baseline_rows.size()) {
    throw DomainError("latency_reduction: row counts differ");
  }
  std::vector<ReductionRow> out;
  out.reserve(scheme_rows.size());
  for (std::size_t k = 0; k < scheme_rows.size(); ++k) {
    const auto& s = scheme_rows[k];
    const auto& b = baseline_rows[k];
    if (s.snr_db != b.snr_db || s.packet_bits != b.packet_bits || s.prune_rate != b.prune_rate) {
      throw DomainError("latency_reduction: grid points differ at row " + std::to_string(k));
    }
    out.push_back({s.scheme, b.scheme, s.snr_db, s.packet_bits, s.prune_rate,
                   latency_reduction(s.mean_t_total, b.mean_t_total)});
  }
  return out;
}

OracleReport oracle_check(std::size_t instances, std::size_t max_size, std::uint64_t seed) {
  if (max_size < 1 || max_size > kBruteForceLimit) {
    throw DomainError("oracle_check: max_size must lie in [1, 20]");
  }
  constexpr int kWidth = 8;
  const double alpha = loss_scale(kWidth);
  Rng rng = make_rng(seed, 0x4f524143);  // "ORAC"
  std::uniform_int_distribution<std::size_t> size_draw(1, max_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  OracleReport report;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t size = size_draw(rng);
    std::vector<PacketCost> packets(size);
    std::vector<double> costs(size);
    ControlState state;
    for (std::size_t k = 0; k < size; ++k) {
      // Unit average BER so the cost equals alpha * s, then recompute the
      // cost exactly as the controller does.
      packets[k] = {k, unit(rng) / alpha, 1.0};
      costs[k] = alpha * packets[k].sensitivity * packets[k].avg_ber;
      state.active.push_back(k);
    }
    const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
    state.beta_res = unit(rng) * total;
    state.beta_total = state.beta_res;

    const RoundDecision decision = pasar_round(state, packets, kWidth);
    std::vector<std::size_t> greedy = greedy_oracle(costs, state.beta_res);
    std::sort(greedy.begin(), greedy.end());

    ++report.instances;
    if (decision.ack.size() == brute_force_oracle(costs, state.beta_res)) ++report.cardinality_matches;
    if (decision.ack == greedy) ++report.set_matches;
    if (decision.consumed > state.beta_res * (1.0 + kBudgetSlack) + 1e-300) ++report.budget_violations;
  }
  return report;
}

}  // namespace pasar
