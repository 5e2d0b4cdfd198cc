#include "pasar/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pasar/errors.hpp"

namespace pasar {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::Pasar: return "PASAR";
    case Scheme::HarqI: return "HARQ-I";
    case Scheme::HarqCc: return "HARQ-CC";
    case Scheme::HarqIr: return "HARQ-IR";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  std::string key(text);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "PASAR") return Scheme::Pasar;
  if (key == "HARQ-I") return Scheme::HarqI;
  if (key == "HARQ-CC") return Scheme::HarqCc;
  if (key == "HARQ-IR") return Scheme::HarqIr;
  throw ConfigError("unknown scheme '" + std::string(text) + "'");
}

double ChannelConfig::avg_snr_linear() const noexcept {
  return std::pow(10.0, avg_snr_db / 10.0);
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double uncoded_ber(double gamma, int modulation_order) noexcept {
  if (modulation_order <= 2) return q_function(std::sqrt(2.0 * gamma));
  const double m = modulation_order;
  const double bits = std::log2(m);
  return (4.0 / bits) * (1.0 - 1.0 / std::sqrt(m)) * q_function(std::sqrt(3.0 * gamma / (m - 1.0)));
}

double coded_ber(double gamma, const McsConfig& mcs) noexcept {
  if (!(gamma >= 0.0)) return 0.5;
  const double effective = gamma * std::pow(10.0, mcs.coding_gain_db / 10.0);
  return std::clamp(uncoded_ber(effective, mcs.modulation_order), 0.0, 0.5);
}

double draw_fade(const ChannelConfig& config, Rng& rng) {
  std::exponential_distribution<double> power(1.0);
  const double h2 = power(rng);
  const double snr = config.avg_snr_linear();
  if (snr == 0.0) return 0.0;
  if (std::isinf(snr)) return std::numeric_limits<double>::infinity();
  return h2 * snr;
}

double combine_cc(std::span<const double> history) {
  if (history.empty()) throw DomainError("combine_cc: empty history");
  double sum = 0.0;
  for (double g : history) {
    if (!(g >= 0.0)) throw DomainError("combine_cc: negative SNR in history");
    sum += g;
  }
  return sum;
}

double combine_ir(std::span<const double> history) {
  if (history.empty()) throw DomainError("combine_ir: empty history");
  double product = 1.0;
  for (double g : history) {
    if (!(g >= 0.0)) throw DomainError("combine_ir: negative SNR in history");
    product *= 1.0 + g;
  }
  return product - 1.0;
}

TransmissionOutcome attempt(Scheme scheme, std::vector<double>& history,
                            const ChannelConfig& config, Rng& rng) {
  TransmissionOutcome out;
  out.snr_linear = draw_fade(config, rng);
  history.push_back(out.snr_linear);
  out.attempt_index = static_cast<int>(history.size());
  switch (scheme) {
    case Scheme::Pasar:
    case Scheme::HarqI: out.combined_snr = out.snr_linear; break;
    case Scheme::HarqCc: out.combined_snr = combine_cc(history); break;
    case Scheme::HarqIr: out.combined_snr = combine_ir(history); break;
  }
  out.ber = coded_ber(out.combined_snr, config.mcs);
  return out;
}

void CombiningState::add(double gamma) noexcept {
  sum_ += gamma;
  product_ *= 1.0 + gamma;
  last_ = gamma;
  ++attempts_;
}

double CombiningState::effective_snr(Scheme scheme) const noexcept {
  switch (scheme) {
    case Scheme::HarqCc: return sum_;
    case Scheme::HarqIr: return product_ - 1.0;
    case Scheme::Pasar:
    case Scheme::HarqI: break;
  }
  return last_;
}

double expected_ber(const ChannelConfig& config) {
  const double snr = config.avg_snr_linear();
  if (snr == 0.0) return 0.5;
  if (std::isinf(snr)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double x) { return coded_ber(snr * x, config.mcs) * std::exp(-x); };
  return gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                              15, 1e-12);
}

}  // namespace pasar
