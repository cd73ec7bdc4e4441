// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

namespace flowcodec::eval {

struct RDPoint {
  double rate = 0.0;  // bits per pixel
  double psnr = 0.0;  // dB
};

using RDCurve = std::vector<RDPoint>;

// Least-squares cubic log10(rate) = c0 + c1 t + c2 t^2 + c3 t^3 with t = psnr - center.
struct LogRateFit {
  double center = 0.0;
  std::array<double, 4> coeffs{};

  double operator()(double psnr) const;
  // Integral of the fit over [lo, hi] in PSNR.
  double integral(double lo, double hi) const;
};

// Throws std::invalid_argument for fewer than 4 points or non-positive / non-finite rates.
void validate_curve(std::span<const RDPoint> curve);

LogRateFit fit_log_rate(std::span<const RDPoint> curve);

// Average rate difference of test vs anchor at equal PSNR, in percent; negative means
// test needs fewer bits. Throws std::invalid_argument when the PSNR ranges do not overlap.
double bd_rate(std::span<const RDPoint> anchor, std::span<const RDPoint> test);

}  // namespace flowcodec::eval
