// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/eval/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flowcodec::eval {

double LogRateFit::operator()(double psnr) const {
  const double t = psnr - center;
  return coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3]));
}

double LogRateFit::integral(double lo, double hi) const {
  auto antiderivative = [&](double psnr) {
    const double t = psnr - center;
    return t * (coeffs[0] + t * (coeffs[1] / 2 + t * (coeffs[2] / 3 + t * coeffs[3] / 4)));
  };
  return antiderivative(hi) - antiderivative(lo);
}

void validate_curve(std::span<const RDPoint> curve) {
  if (curve.size() < 4)
    throw std::invalid_argument("RD curve needs at least 4 points, got " + std::to_string(curve.size()));
  for (const RDPoint& p : curve) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate)) throw std::invalid_argument("RD curve rates must be positive");
    if (!std::isfinite(p.psnr)) throw std::invalid_argument("RD curve PSNR must be finite");
  }
}

LogRateFit fit_log_rate(std::span<const RDPoint> curve) {
  validate_curve(curve);
  LogRateFit fit;
  for (const RDPoint& p : curve) fit.center += p.psnr;
  fit.center /= static_cast<double>(curve.size());

  const auto n = static_cast<Eigen::Index>(curve.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = curve[static_cast<std::size_t>(i)].psnr - fit.center;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    b(i) = std::log10(curve[static_cast<std::size_t>(i)].rate);
  }
  const auto qr = a.colPivHouseholderQr();
  if (qr.rank() < 4) throw std::invalid_argument("RD curve needs 4 distinct PSNR values");
  const Eigen::VectorXd c = qr.solve(b);
  for (int k = 0; k < 4; ++k) fit.coeffs[static_cast<std::size_t>(k)] = c(k);
  return fit;
}

namespace {
std::pair<double, double> psnr_range(std::span<const RDPoint> c) {
  const auto [lo, hi] = std::minmax_element(c.begin(), c.end(), [](auto& a, auto& b) { return a.psnr < b.psnr; });
  return {lo->psnr, hi->psnr};
}
}  // namespace

double bd_rate(std::span<const RDPoint> anchor, std::span<const RDPoint> test) {
  const LogRateFit fa = fit_log_rate(anchor), ft = fit_log_rate(test);
  const auto [alo, ahi] = psnr_range(anchor);
  const auto [tlo, thi] = psnr_range(test);
  const double lo = std::max(alo, tlo), hi = std::min(ahi, thi);
  if (!(hi > lo))
    throw std::invalid_argument("bd_rate: PSNR ranges do not overlap (anchor [" + std::to_string(alo) + ", " +
                                std::to_string(ahi) + "], test [" + std::to_string(tlo) + ", " +
                                std::to_string(thi) + "])");
  const double gap = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
  return (std::pow(10.0, gap) - 1.0) * 100.0;
}

}  // namespace flowcodec::eval
