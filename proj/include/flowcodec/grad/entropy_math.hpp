// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>

namespace flowcodec::grad {

inline constexpr double kScaleLowerBound = 0.11;
inline constexpr double kProbabilityFloor = 1.0 / 65536.0;
inline constexpr double kLn2 = 0.69314718055994530942;

inline double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }
inline double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}
inline double gaussian_scale(double scale_param) { return kScaleLowerBound + softplus(scale_param); }

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t * 0.70710678118654752440); }
inline double normal_pdf(double t) { return 0.39894228040143267794 * std::exp(-0.5 * t * t); }

// Mass of N(mean, scale^2) on [v - 0.5, v + 0.5], evaluated on the lower side of the
// mean for accuracy in the tails.
inline double gaussian_interval_mass(double v, double mean, double scale) {
  const double a = std::abs(v - mean);
  return normal_cdf((0.5 - a) / scale) - normal_cdf((-0.5 - a) / scale);
}

struct MixtureView {
  std::span<const double> logits;
  std::span<const double> locations;
  std::span<const double> log_scales;
};

// Mass of a logistic mixture on [v - 0.5, v + 0.5].
double logistic_mixture_mass(double v, const MixtureView& m);

}  // namespace flowcodec::grad
