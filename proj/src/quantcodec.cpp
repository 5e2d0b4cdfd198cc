#include "pasar/quantcodec.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <string>

#include "pasar/errors.hpp"

namespace pasar {

namespace {

void check_width(int width) {
  if (width < kMinQuantBits || width > kMaxQuantBits) {
    throw DomainError("quantization width must lie in [2, 32], got " + std::to_string(width));
  }
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("bit error rate must lie in [0, 1], got " + std::to_string(p));
  }
}

std::uint32_t width_mask(int width) noexcept {
  return width >= 32 ? 0xFFFFFFFFU : ((1U << width) - 1U);
}

}  // namespace

int FlipMask::count() const noexcept { return std::popcount(flips & width_mask(width)); }

std::int64_t min_value(int width) {
  check_width(width);
  return -(std::int64_t{1} << (width - 1));
}

std::int64_t max_value(int width) {
  check_width(width);
  return (std::int64_t{1} << (width - 1)) - 1;
}

QuantParam encode(std::int64_t value, int width) {
  if (value < min_value(width) || value > max_value(width)) {
    throw DomainError("value " + std::to_string(value) + " not representable in " +
                      std::to_string(width) + " bits");
  }
  return {static_cast<std::uint32_t>(static_cast<std::uint64_t>(value)) & width_mask(width), width};
}

std::int64_t decode(const QuantParam& param) noexcept {
  const int n = param.width;
  const std::uint64_t bits = param.bits & width_mask(n);
  const auto magnitude = static_cast<std::int64_t>(bits & ((std::uint64_t{1} << (n - 1)) - 1));
  const std::int64_t sign = (bits >> (n - 1)) & 1U;
  return magnitude - sign * (std::int64_t{1} << (n - 1));
}

std::int64_t apply_flips(const QuantParam& param, const FlipMask& mask) {
  if (param.width != mask.width) {
    throw DomainError("flip mask width " + std::to_string(mask.width) +
                      " does not match parameter width " + std::to_string(param.width));
  }
  const int n = param.width;
  std::int64_t value = 0;
  for (int i = 0; i < n; ++i) {
    const std::int64_t b = param.bit(i) ? 1 : 0;
    const std::int64_t a = mask.flipped(i) ? 1 : 0;
    const std::int64_t term = (a * (b ? -1 : 1) + b) * (std::int64_t{1} << i);
    value += (i == n - 1) ? -term : term;
  }
  return value;
}

FlipMask sample_flips(int width, double bit_error_rate, Rng& rng) {
  check_width(width);
  check_probability(bit_error_rate);
  FlipMask mask{0, width};
  if (bit_error_rate == 0.0) return mask;
  if (bit_error_rate == 1.0) {
    mask.flips = width_mask(width);
    return mask;
  }
  std::bernoulli_distribution flip(bit_error_rate);
  for (int i = 0; i < width; ++i) {
    if (flip(rng)) mask.flips |= (1U << i);
  }
  return mask;
}

double distortion_variance(int width, double bit_error_rate, bool exact) {
  check_width(width);
  check_probability(bit_error_rate);
  const double spread = (std::ldexp(1.0, 2 * width) - 1.0) / 3.0;
  const double p = bit_error_rate;
  return (exact ? p * (1.0 - p) : p) * spread;
}

double loss_scale(int width) {
  check_width(width);
  return (std::ldexp(1.0, 2 * width) - 1.0) / 6.0;
}

std::size_t transmit_words(std::span<const std::int64_t> original, int width,
                           double bit_error_rate, Rng& rng, std::span<std::int64_t> received) {
  check_width(width);
  check_probability(bit_error_rate);
  if (received.size() != original.size()) {
    throw DomainError("transmit_words: output span size mismatch");
  }
  const std::uint32_t mask = width_mask(width);
  for (std::size_t k = 0; k < original.size(); ++k) {
    received[k] = original[k];
  }
  if (bit_error_rate == 0.0 || original.empty()) return 0;

  const std::uint64_t total_bits = static_cast<std::uint64_t>(original.size()) * width;
  auto flip_bit = [&](std::uint64_t position) {
    const std::size_t word = position / static_cast<std::uint64_t>(width);
    const int bit = static_cast<int>(position % static_cast<std::uint64_t>(width));
    QuantParam p{static_cast<std::uint32_t>(static_cast<std::uint64_t>(received[word])) & mask, width};
    p.bits ^= (1U << bit);
    received[word] = decode(p);
  };

  std::size_t flipped = 0;
  if (bit_error_rate >= 1.0) {
    for (std::uint64_t pos = 0; pos < total_bits; ++pos) flip_bit(pos);
    return static_cast<std::size_t>(total_bits);
  }
  // Gap to the next flipped bit is Geometric(p) on {0, 1, ...}, drawn by
  // inversion with log1p so BERs far below machine epsilon stay exact.
  const double log_keep = std::log1p(-bit_error_rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto next_gap = [&](std::uint64_t remaining) -> std::optional<std::uint64_t> {
    const double u = 1.0 - unit(rng);  // (0, 1]
    const double g = std::floor(std::log(u) / log_keep);
    if (!(g < static_cast<double>(remaining))) return std::nullopt;
    return static_cast<std::uint64_t>(g);
  };
  auto first = next_gap(total_bits);
  if (!first) return 0;
  std::uint64_t pos = *first;
  while (true) {
    flip_bit(pos);
    ++flipped;
    const std::uint64_t remaining = total_bits - pos - 1;
    if (remaining == 0) break;
    auto g = next_gap(remaining);
    if (!g) break;
    pos += 1 + *g;
  }
  return flipped;
}

}  // namespace pasar
