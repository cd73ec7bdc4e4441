// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flowcodec::bitstream {

inline constexpr int kPrecisionBits = 16;
inline constexpr std::uint32_t kTotalFrequency = 1u << kPrecisionBits;

// Quantized cumulative distribution over [min_symbol, min_symbol + size() - 1].
// cdf.front() == 0, cdf.back() == 2^16, every interval at least 1.
struct CdfTable {
  int min_symbol = 0;
  std::vector<std::uint32_t> cdf;

  int size() const { return static_cast<int>(cdf.size()) - 1; }
  int max_symbol() const { return min_symbol + size() - 1; }
  bool contains(int symbol) const { return symbol >= min_symbol && symbol <= max_symbol(); }
  std::uint32_t frequency(int symbol) const {
    const auto i = static_cast<std::size_t>(symbol - min_symbol);
    return cdf[i + 1] - cdf[i];
  }
  // Throws std::logic_error describing the first broken invariant.
  void validate() const;
};

// Every symbol gets 1 + floor(p / sum(p) * (2^16 - n)); the leftover goes to the first
// most probable symbol. Masses must be finite and non-negative.
CdfTable quantize_masses(int min_symbol, std::span<const double> masses);

// Tables from the entropy models. Evaluations use the functions below, never the C
// library's transcendental functions, so tables are identical on every platform.
CdfTable gaussian_cdf(double mean, double scale_param, int min_symbol, int max_symbol);
CdfTable logistic_mixture_cdf(std::span<const double> logits, std::span<const double> locations,
                              std::span<const double> log_scales, int min_symbol, int max_symbol);

// -log2 of the quantized probability of `symbol`.
double code_length(const CdfTable& table, int symbol);

namespace det {
// Range reduction by ln 2 plus a degree-17 Taylor polynomial.
double exp(double x);
// Mantissa/exponent split plus an atanh series.
double log(double x);
double log1p(double x);
// Chebyshev-fitted complementary error function, fractional error below 1.2e-7.
double erfc(double x);
double softplus(double x);
double sigmoid(double x);
}  // namespace det

}  // namespace flowcodec::bitstream
