// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/bitstream/cdf.hpp"

#include "flowcodec/grad/entropy_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flowcodec::bitstream {

namespace det {

namespace {
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2e = 1.44269504088896338700e+00;
}  // namespace

double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.0) return HUGE_VAL;
  if (x < -745.0) return 0.0;
  const double k = std::floor(x * kLog2e + 0.5);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  // Horner form of sum r^n / n!, n <= 17; |r| <= 0.35.
  double p = 1.0;
  for (int n = 17; n >= 1; --n) p = 1.0 + p * r / n;
  return std::ldexp(p, static_cast<int>(k));
}

double log(double x) {
  if (!(x > 0.0)) return x == 0.0 ? -HUGE_VAL : std::nan("");
  if (std::isinf(x)) return x;
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  if (m < 0.70710678118654752440) {
    m *= 2.0;
    --e;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double sum = 0.0;
  for (int n = 27; n >= 1; n -= 2) sum = 1.0 / n + s2 * sum;
  return 2.0 * s * sum + e * kLn2Lo + e * kLn2Hi;
}

double log1p(double x) {
  if (std::abs(x) < 1e-4) return x * (1.0 - x * (0.5 - x * (1.0 / 3.0 - x * 0.25)));
  return log(1.0 + x);
}

double erfc(double x) {
  const double z = std::abs(x);
  const double t = 1.0 / (1.0 + 0.5 * z);
  const double poly =
      -z * z - 1.26551223 +
      t * (1.00002368 +
           t * (0.37409196 +
                t * (0.09678418 +
                     t * (-0.18628806 +
                          t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
  const double r = t * exp(poly);
  return x >= 0.0 ? r : 2.0 - r;
}

double softplus(double x) { return x > 30.0 ? x : log1p(exp(x)); }

double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + exp(-x)) : exp(x) / (1.0 + exp(x)); }

}  // namespace det

void CdfTable::validate() const {
  if (cdf.size() < 2) throw std::logic_error("CdfTable: needs at least one symbol");
  if (cdf.front() != 0) throw std::logic_error("CdfTable: first entry must be 0");
  if (cdf.back() != kTotalFrequency) throw std::logic_error("CdfTable: last entry must be 2^16");
  for (std::size_t i = 1; i < cdf.size(); ++i)
    if (cdf[i] <= cdf[i - 1])
      throw std::logic_error("CdfTable: symbol " + std::to_string(min_symbol + static_cast<int>(i) - 1) +
                             " has zero frequency");
}

CdfTable quantize_masses(int min_symbol, std::span<const double> masses) {
  const auto n = static_cast<std::uint32_t>(masses.size());
  if (n == 0 || n > kTotalFrequency / 2) throw std::invalid_argument("quantize_masses: bad alphabet size");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("quantize_masses: masses must be finite, >= 0");
    total += m;
  }
  const double spare = static_cast<double>(kTotalFrequency - n);
  std::vector<std::uint32_t> freq(n, 1);
  std::uint32_t used = n;
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > 0.0) {
      const auto extra = static_cast<std::uint32_t>(std::floor(masses[i] / total * spare));
      freq[i] += extra;
      used += extra;
    }
    if (masses[i] > masses[top]) top = i;
  }
  freq[top] += kTotalFrequency - used;
  CdfTable t{min_symbol, std::vector<std::uint32_t>(n + 1, 0)};
  for (std::size_t i = 0; i < n; ++i) t.cdf[i + 1] = t.cdf[i] + freq[i];
  return t;
}

namespace {

void check_range(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("cdf: empty alphabet");
}

}  // namespace

CdfTable gaussian_cdf(double mean, double scale_param, int min_symbol, int max_symbol) {
  check_range(min_symbol, max_symbol);
  const double scale = grad::kScaleLowerBound + det::softplus(scale_param);
  // Phi(t) = erfc(-t / sqrt 2) / 2; differences taken on the tail side for accuracy.
  auto upper_tail = [&](double v) { return 0.5 * det::erfc((v - mean) / scale * 0.70710678118654752440); };
  std::vector<double> masses;
  masses.reserve(static_cast<std::size_t>(max_symbol - min_symbol + 1));
  for (int s = min_symbol; s <= max_symbol; ++s) {
    const double lo = s - 0.5, hi = s + 0.5;
    double m;
    if (s >= mean)
      m = upper_tail(lo) - upper_tail(hi);
    else
      m = upper_tail(2.0 * mean - hi) - upper_tail(2.0 * mean - lo);
    masses.push_back(std::max(m, 0.0));
  }
  return quantize_masses(min_symbol, masses);
}

CdfTable logistic_mixture_cdf(std::span<const double> logits, std::span<const double> locations,
                              std::span<const double> log_scales, int min_symbol, int max_symbol) {
  check_range(min_symbol, max_symbol);
  const std::size_t K = logits.size();
  if (K == 0 || locations.size() != K || log_scales.size() != K)
    throw std::invalid_argument("logistic_mixture_cdf: inconsistent mixture");
  double top = logits[0];
  for (double l : logits) top = std::max(top, l);
  std::vector<double> w(K);
  double z = 0.0;
  for (std::size_t k = 0; k < K; ++k) z += (w[k] = det::exp(logits[k] - top));
  std::vector<double> masses;
  for (int s = min_symbol; s <= max_symbol; ++s) {
    double m = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double sc = det::exp(log_scales[k]);
      const double u = (s + 0.5 - locations[k]) / sc, l = (s - 0.5 - locations[k]) / sc;
      const double c = s > locations[k] ? det::sigmoid(-l) - det::sigmoid(-u) : det::sigmoid(u) - det::sigmoid(l);
      m += w[k] / z * c;
    }
    masses.push_back(std::max(m, 0.0));
  }
  return quantize_masses(min_symbol, masses);
}

double code_length(const CdfTable& table, int symbol) {
  if (!table.contains(symbol)) throw std::out_of_range("code_length: symbol outside the alphabet");
  return kPrecisionBits - std::log2(static_cast<double>(table.frequency(symbol)));
}

}  // namespace flowcodec::bitstream
