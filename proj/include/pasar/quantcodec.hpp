#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "pasar/rng.hpp"

namespace pasar {

inline constexpr int kMinQuantBits = 2;
inline constexpr int kMaxQuantBits = 32;

// n-bit signed word; bit i of `bits` is b_i, b_{n-1} carries weight -2^{n-1}.
struct QuantParam {
  std::uint32_t bits = 0;
  int width = 8;

  bool bit(int i) const noexcept { return (bits >> i) & 1U; }
  friend bool operator==(const QuantParam&, const QuantParam&) = default;
};

// Bit i set means position i flipped in transit.
struct FlipMask {
  std::uint32_t flips = 0;
  int width = 8;

  bool flipped(int i) const noexcept { return (flips >> i) & 1U; }
  int count() const noexcept;
  friend bool operator==(const FlipMask&, const FlipMask&) = default;
};

std::int64_t min_value(int width);
std::int64_t max_value(int width);

QuantParam encode(std::int64_t value, int width);
std::int64_t decode(const QuantParam& param) noexcept;

// Distorted integer: sum_{i<n-1} [a_i(-1)^{b_i} + b_i] 2^i - [a_{n-1}(-1)^{b_{n-1}} + b_{n-1}] 2^{n-1}.
std::int64_t apply_flips(const QuantParam& param, const FlipMask& mask);

FlipMask sample_flips(int width, double bit_error_rate, Rng& rng);

// exact: P(1-P)(4^n-1)/3; otherwise the small-P approximation P(4^n-1)/3.
double distortion_variance(int width, double bit_error_rate, bool exact);

// (4^n - 1)/6
double loss_scale(int width);

// Passes `original` through a binary symmetric channel with crossover
// probability `bit_error_rate`, writing decoded words into `received`.
// Flip positions are drawn by geometric skipping over the concatenated
// payload, which is distributionally identical to one Bernoulli per bit.
// Returns the number of flipped bits.
std::size_t transmit_words(std::span<const std::int64_t> original, int width,
                           double bit_error_rate, Rng& rng,
                           std::span<std::int64_t> received);

}  // namespace pasar
