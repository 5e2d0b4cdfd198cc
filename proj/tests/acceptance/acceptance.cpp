// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.
//
//   acceptance            run every criterion
//   acceptance 4 5        run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pasar/channel.hpp"
#include "pasar/controller.hpp"
#include "pasar/harness.hpp"
#include "pasar/lossmodel.hpp"
#include "pasar/protocol.hpp"
#include "pasar/quantcodec.hpp"
#include "pasar/rng.hpp"
#include "pasar/sensitivity.hpp"

using namespace pasar;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

const ResultRow& find_row(const std::vector<ResultRow>& rows, Scheme scheme, double snr,
                          int bits = 1000, double prune_rate = 0.0) {
  for (const auto& r : rows) {
    if (r.scheme == scheme && r.snr_db == snr && r.packet_bits == bits && r.prune_rate == prune_rate) {
      return r;
    }
  }
  throw std::runtime_error("missing grid point");
}

// The default sweep, extended to two packet sizes to exceed 10^4 sessions.
const std::vector<ResultRow>& default_sweep(double* elapsed = nullptr) {
  static std::optional<std::vector<ResultRow>> rows;
  static double took = 0.0;
  if (!rows) {
    ExperimentConfig cfg;
    cfg.packet_bits_grid = {500, 1000};
    cfg.budget.reference_snr_db = -10.0;
    const auto start = Clock::now();
    rows = run_experiment(cfg);
    took = seconds_since(start);
  }
  if (elapsed) *elapsed = took;
  return *rows;
}

// ---------------------------------------------------------------------------

Outcome variance_law() {
  const auto start = Clock::now();
  constexpr int kTrials = 10'000'000;
  Rng rng = make_rng(101, 1);
  Outcome out{true, {}, {}};
  double worst = 0.0;
  for (int width : {4, 8}) {
    std::uniform_int_distribution<std::int64_t> value(min_value(width), max_value(width));
    for (double p : {0.001, 0.01, 0.05, 0.2}) {
      const std::int64_t w = value(rng);
      const QuantParam q = encode(w, width);
      double sum = 0.0, sum2 = 0.0;
      for (int k = 0; k < kTrials; ++k) {
        const double dw = static_cast<double>(decode(encode(apply_flips(q, sample_flips(width, p, rng)), width)) - w);
        sum += dw;
        sum2 += dw * dw;
      }
      const double mean = sum / kTrials;
      const double var = (sum2 - kTrials * mean * mean) / (kTrials - 1.0);
      const double exact = distortion_variance(width, p, true);
      const double rel = std::abs(var / exact - 1.0);
      worst = std::max(worst, rel);
      out.pass = out.pass && rel <= 0.02;
      out.details.push_back(fmt("n=%d P=%-5g w=%-4lld sample %.6g exact %.6g rel %.3f%%", width, p,
                                static_cast<long long>(w), var, exact, 100 * rel));
    }
  }
  const double took = seconds_since(start);
  out.pass = out.pass && took < 30.0;
  out.summary = fmt("variance law, 8 cells x %d trials: worst rel err %.2f%% (tol 2%%), %.1f s (limit 30 s)",
                    kTrials, 100 * worst, took);
  return out;
}

Outcome downloading_loss() {
  const auto start = Clock::now();
  constexpr int kTrials = 1'000'000;
  const int width = 4;
  const double p = 0.01;
  Rng rng = make_rng(202, 1);
  std::uniform_real_distribution<double> h_draw(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> value(min_value(width), max_value(width));
  std::vector<double> h(16);
  std::vector<std::int64_t> original(16);
  for (std::size_t d = 0; d < 16; ++d) {
    h[d] = h_draw(rng);
    original[d] = value(rng);
  }
  const SensitivityTable table(h, "random16", width);
  std::vector<std::int64_t> received(16);
  std::vector<double> assembled(16);
  double sum = 0.0;
  for (int k = 0; k < kTrials; ++k) {
    transmit_words(original, width, p, rng, received);
    for (std::size_t d = 0; d < 16; ++d) assembled[d] = static_cast<double>(received[d]);
    sum += realized_model_loss(table, original, assembled);
  }
  const double realized = sum / kTrials;
  const double exact = loss_scale(width) * p * (1.0 - p) * table.total();
  const double approx = loss_scale(width) * table.total() * p;  // alpha * sum_j s_j P_b
  const double rel_exact = std::abs(realized / exact - 1.0);
  const double rel_approx = std::abs(realized / approx - 1.0);
  const double took = seconds_since(start);
  Outcome out;
  out.pass = rel_exact <= 0.03 && rel_approx <= 0.03 + p && took < 60.0;
  out.summary = fmt("downloading loss, 16 params n=4 P=%.2g, %d realizations: exact-form err %.2f%% "
                    "(tol 3%%), approximation err %.2f%% (tol %.0f%%), %.1f s (limit 60 s)",
                    p, kTrials, 100 * rel_exact, 100 * rel_approx, 100 * (0.03 + p), took);
  out.details.push_back(fmt("realized %.6g  exact %.6g  approximation %.6g", realized, exact, approx));
  return out;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  const auto r = oracle_check(1000, 12, 303);
  const double took = seconds_since(start);
  Outcome out;
  out.pass = r.instances == 1000 && r.cardinality_matches == 1000 && r.set_matches == 1000 &&
             r.budget_violations == 0 && took < 10.0;
  out.summary = fmt("greedy optimality, %zu instances |V|<=12: cardinality %zu/%zu, set %zu/%zu, "
                    "budget violations %zu, %.2f s (limit 10 s)",
                    r.instances, r.cardinality_matches, r.instances, r.set_matches, r.instances,
                    r.budget_violations, took);
  return out;
}

Outcome budget_safety() {
  double took = 0.0;
  const auto& rows = default_sweep(&took);
  std::size_t sessions = 0, violations = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    sessions += static_cast<std::size_t>(r.runs);
    violations += r.budget_violations;
    worst = std::max(worst, r.max_consumed_fraction);
  }

  // The default budget rarely binds, so also sweep budgets calibrated at or
  // above the operating SNR, where the residual is driven to zero.
  ExperimentConfig tight;
  tight.source.dimension = 2500;
  tight.runs = 100;
  tight.t_max = 4000;
  tight.budget.reference_snr_db = 0.0;
  tight.budget.target_fraction = 0.5;
  tight.budget_model = BudgetModel::Averaged;
  std::size_t tight_sessions = 0, tight_violations = 0;
  double tight_worst = 0.0;
  for (BerMode mode : {BerMode::Analytic, BerMode::Empirical}) {
    tight.ber_mode = mode;
    for (const auto& r : run_experiment(tight)) {
      tight_sessions += static_cast<std::size_t>(r.runs);
      tight_violations += r.budget_violations;
      tight_worst = std::max(tight_worst, r.max_consumed_fraction);
    }
  }
  Outcome out;
  out.details.push_back(fmt("tight-budget stress: %zu sessions, %zu violations, max consumed/beta %.12f",
                            tight_sessions, tight_violations, tight_worst));
  out.pass = sessions >= 10'000 && violations == 0 && worst <= 1.0 + 1e-9 && tight_violations == 0 &&
             tight_worst <= 1.0 + 1e-9;
  out.summary = fmt("budget safety, default sweep of %zu sessions: %zu violations, max consumed/beta %.12f "
                    "(tol 1+1e-9), sweep %.1f s",
                    sessions, violations, worst, took);
  return out;
}

Outcome directional_reproduction() {
  double took = 0.0;
  const auto& rows = default_sweep(&took);
  const double grid[] = {-5.0, 0.0, 5.0, 10.0};
  Outcome out{true, {}, {}};
  std::vector<double> reduction;
  for (double snr : grid) {
    const auto& p = find_row(rows, Scheme::Pasar, snr);
    const auto& i = find_row(rows, Scheme::HarqI, snr);
    reduction.push_back(latency_reduction(p.mean_t_total, i.mean_t_total));
    out.pass = out.pass && p.mean_t_total < i.mean_t_total && p.runs >= 500;
    out.details.push_back(fmt("%5.1f dB  PASAR %9.3f  HARQ-I %9.3f  reduction %6.2f%%", snr,
                              p.mean_t_total, i.mean_t_total, reduction.back()));
  }
  const bool lowest = reduction.front() >= 10.0;
  const bool shrinking = std::is_sorted(reduction.rbegin(), reduction.rend(), std::less_equal<>{});
  out.pass = out.pass && lowest && shrinking && took < 600.0;
  out.summary = fmt("PASAR vs HARQ-I at equal calibrated budget: reductions %.2f/%.2f/%.2f/%.2f%% "
                    "(>=10%% at -5 dB, shrinking with SNR), sweep %.1f s (limit 600 s)",
                    reduction[0], reduction[1], reduction[2], reduction[3], took);
  return out;
}

Outcome convergence_to_uniform() {
  Outcome out{true, {}, {}};
  const std::vector<double> grid{-5.0, 0.0, 5.0, 10.0};

  ExperimentConfig constant;
  constant.source.distribution = Constant{1.0};
  constant.schemes = {Scheme::Pasar, Scheme::HarqI};
  constant.budget.reference_snr_db = -10.0;
  const auto crows = run_experiment(constant);
  bool within = true;
  double worst = 0.0;
  for (double snr : grid) {
    const double p = find_row(crows, Scheme::Pasar, snr).mean_t_total;
    const double u = find_row(crows, Scheme::HarqI, snr).mean_t_total;
    const double gap = std::abs(p / u - 1.0);
    worst = std::max(worst, gap);
    within = within && gap <= 0.03;
    out.details.push_back(fmt("constant table %5.1f dB  PASAR %9.3f  uniform %9.3f  gap %6.2f%% %s", snr,
                              p, u, 100 * gap, gap <= 0.03 ? "" : "(outside 3%)"));
  }

  ExperimentConfig pruned;
  pruned.schemes = {Scheme::Pasar, Scheme::HarqI};
  pruned.prune_rates = {0.0, 0.1, 0.2, 0.4};
  pruned.budget.reference_snr_db = -10.0;
  const auto prows = run_experiment(pruned);
  bool decreasing = true;
  for (double snr : grid) {
    std::vector<double> red;
    for (double rate : pruned.prune_rates) {
      red.push_back(latency_reduction(find_row(prows, Scheme::Pasar, snr, 1000, rate).mean_t_total,
                                      find_row(prows, Scheme::HarqI, snr, 1000, rate).mean_t_total));
    }
    const bool mono = std::is_sorted(red.rbegin(), red.rend(), std::less<>{});
    decreasing = decreasing && mono;
    out.details.push_back(fmt("lognormal %5.1f dB reduction vs uniform at prune 0/0.1/0.2/0.4: "
                              "%.2f/%.2f/%.2f/%.2f%% %s",
                              snr, red[0], red[1], red[2], red[3], mono ? "decreasing" : "NOT decreasing"));
  }
  out.pass = within && decreasing;
  out.summary = fmt("convergence to uniform: constant-table gap worst %.2f%% (tol 3%%) %s; "
                    "pruning gains decrease %s",
                    100 * worst, within ? "ok" : "FAILED", decreasing ? "ok" : "FAILED");
  return out;
}

Outcome skewness_estimator() {
  const auto expo = stats(synthesize_table(1'000'000, Exponential{1.0}, 707));
  const auto table = stats(synthesize_table(12'500, Lognormal{}, 1));
  Outcome out;
  out.pass = std::abs(expo.skewness - 2.0) <= 0.1 && std::abs(table.skewness) >= 1.0;
  out.summary = fmt("skewness: exponential(1) x 10^6 gives %.4f (2 +- 0.1); default synthetic table %.3f (|g| >= 1)",
                    expo.skewness, table.skewness);
  return out;
}

Outcome combining_order() {
  const auto& rows = default_sweep();
  const auto& i = find_row(rows, Scheme::HarqI, 0.0);
  const auto& cc = find_row(rows, Scheme::HarqCc, 0.0);
  const auto& ir = find_row(rows, Scheme::HarqIr, 0.0);
  Outcome out;
  out.pass = ir.mean_t_total <= cc.mean_t_total && cc.mean_t_total <= i.mean_t_total && i.runs >= 500;
  out.summary = fmt("combining order at 0 dB over %d runs: HARQ-IR %.3f <= HARQ-CC %.3f <= HARQ-I %.3f",
                    i.runs, ir.mean_t_total, cc.mean_t_total, i.mean_t_total);
  return out;
}

Outcome scale_invariance() {
  const auto table = synthesize_table(12'500, Lognormal{}, 1);
  std::vector<double> scaled_values(table.values().begin(), table.values().end());
  for (double& v : scaled_values) v *= 1e3;
  const SensitivityTable scaled(scaled_values, "scaled", table.quant_bits());

  ExperimentConfig cfg;
  const McsConfig mcs = cfg.mcs_for(1000);
  ChannelConfig reference{-10.0, mcs};
  const double beta = calibrate_budget(table, mcs, reference, 1.0);

  std::size_t identical = 0, sessions = 0;
  for (Scheme scheme : {Scheme::Pasar, Scheme::HarqI, Scheme::HarqCc, Scheme::HarqIr}) {
    for (std::size_t r = 0; r < 100; ++r) {
      SessionConfig s;
      s.scheme = scheme;
      s.channel = {r % 2 ? -5.0 : 0.0, mcs};
      s.seed = session_seed(909, r);
      s.record_trace = true;
      s.beta_total = beta;
      const auto original = draw_original_params(table.size(), 8, s.seed);
      const auto a = run_session(s, table, original);
      s.beta_total = beta * 1e3;
      const auto b = run_session(s, scaled, original);
      bool same = a.t_total == b.t_total && a.trace.size() == b.trace.size();
      for (std::size_t t = 0; same && t < a.trace.size(); ++t) {
        same = a.trace[t].ack == b.trace[t].ack && a.trace[t].nack == b.trace[t].nack;
      }
      identical += same;
      ++sessions;
    }
  }
  Outcome out;
  out.pass = identical == sessions;
  out.summary = fmt("scale invariance (s and beta x 10^3): %zu/%zu sessions with identical ack/nack "
                    "traces and t_total",
                    identical, sessions);
  return out;
}

// Phase-1 halving statistic: mean fraction of the active set terminated per
// epoch with lognormal packets and i.i.d. average BERs. Reported, not asserted.
void report_halving() {
  const auto table = synthesize_table(12'500, Lognormal{}, 1);
  ExperimentConfig cfg;
  const McsConfig mcs = cfg.mcs_for(1000);
  const auto packets = packetize(table, mcs);
  ChannelConfig channel{0.0, mcs};
  const double beta = calibrate_budget(table, mcs, channel, 1.0);
  Rng rng = make_rng(4242, 0);
  double fraction_sum = 0.0;
  std::size_t epochs = 0;
  for (int instance = 0; instance < 2000; ++instance) {
    ControlState state;
    std::vector<PacketCost> costs;
    for (const auto& p : packets) {
      state.active.push_back(p.id);
      costs.push_back({p.id, p.sensitivity, coded_ber(draw_fade(channel, rng), mcs)});
    }
    state.beta_res = beta;
    state.beta_total = beta;
    for (const auto& e : pasar_round(state, costs, mcs.quant_bits).phase1) {
      fraction_sum += static_cast<double>(e.terminated.size()) / static_cast<double>(e.active_count);
      ++epochs;
    }
  }
  std::printf("INFO halving statistic: mean fraction terminated per phase-1 epoch %.3f over %zu epochs\n",
              epochs ? fraction_sum / static_cast<double>(epochs) : 0.0, epochs);
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> criteria = {
      {"1", variance_law},           {"2", downloading_loss},     {"3", oracle_equivalence},
      {"4", budget_safety},          {"5", directional_reproduction},
      {"6", convergence_to_uniform}, {"7", skewness_estimator},   {"8", combining_order},
      {"9", scale_invariance},
  };
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) selected.emplace_back(argv[i]);
  const bool all = selected.empty();
  if (all) {
    for (const auto& [id, fn] : criteria) selected.push_back(id);
  }

  int failures = 0;
  for (const auto& id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what(), {}};
    }
    for (const auto& line : out.details) std::printf("     %s\n", line.c_str());
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", id.c_str(), out.summary.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  if (all) report_halving();
  return failures == 0 ? 0 : 1;
}
