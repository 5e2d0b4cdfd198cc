#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pasar/mcs.hpp"
#include "pasar/rng.hpp"

namespace pasar {

enum class Scheme { Pasar, HarqI, HarqCc, HarqIr };

std::string_view to_string(Scheme scheme) noexcept;
// Accepts "PASAR", "HARQ-I", "HARQ-CC", "HARQ-IR" (case-insensitive).
Scheme parse_scheme(std::string_view text);

struct ChannelConfig {
  // Long-term average SNR. -inf and +inf are accepted as the silent and
  // noiseless limits.
  double avg_snr_db = 0.0;
  McsConfig mcs{};

  double avg_snr_linear() const noexcept;
};

struct TransmissionOutcome {
  double snr_linear = 0.0;    // fresh per-attempt draw
  double combined_snr = 0.0;  // SNR the decoder sees after combining
  double ber = 0.5;
  int attempt_index = 0;      // 1-based
};

// Gaussian tail probability.
double q_function(double x) noexcept;

// Gray-coded M-ary bit error approximation at symbol SNR gamma.
double uncoded_ber(double gamma, int modulation_order) noexcept;

// Uncoded BER at gamma scaled by the coding gain, clamped to [0, 0.5].
double coded_ber(double gamma, const McsConfig& mcs) noexcept;

// Rayleigh block fading: |h|^2 ~ Exp(1) scaled by the average SNR.
double draw_fade(const ChannelConfig& config, Rng& rng);

double combine_cc(std::span<const double> history);
double combine_ir(std::span<const double> history);

// Appends a fresh fade to `history` and reports the BER the decoder sees
// under `scheme`.
TransmissionOutcome attempt(Scheme scheme, std::vector<double>& history,
                            const ChannelConfig& config, Rng& rng);

// Running form of the combiners for long sessions: O(1) per attempt instead
// of re-reducing the history.
class CombiningState {
 public:
  void add(double gamma) noexcept;
  double effective_snr(Scheme scheme) const noexcept;
  double last() const noexcept { return last_; }
  int attempts() const noexcept { return attempts_; }

 private:
  double sum_ = 0.0;
  double product_ = 1.0;
  double last_ = 0.0;
  int attempts_ = 0;
};

// E[coded_ber(gamma)] over Rayleigh fading at the configured average SNR.
double expected_ber(const ChannelConfig& config);

}  // namespace pasar
