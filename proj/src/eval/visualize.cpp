// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/eval/visualize.hpp"

#include "flowcodec/bytes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flowcodec::eval {

namespace {

std::vector<double> magnitudes(const motion::FlowField& flow) {
  std::vector<double> m;
  m.reserve(static_cast<std::size_t>(flow.height()) * flow.width());
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      const double u = flow.horizontal(y, x), v = flow.vertical(y, x);
      if (!std::isfinite(u) || !std::isfinite(v)) throw std::invalid_argument("flow visualization: non-finite flow");
      m.push_back(std::hypot(u, v));
    }
  return m;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

double magnitude_p99(const motion::FlowField& flow) {
  std::vector<double> m = magnitudes(flow);
  if (m.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(m.size()))) - 1;
  std::nth_element(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(rank), m.end());
  return m[rank];
}

RgbImage flow_to_rgb(const motion::FlowField& flow) {
  const double norm = magnitude_p99(flow);
  RgbImage img{flow.width(), flow.height(), {}};
  img.pixels.reserve(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      const double u = flow.horizontal(y, x), v = flow.vertical(y, x);
      const double s = norm > 0.0 ? std::min(std::hypot(u, v) / norm, 1.0) : 0.0;
      double hue = std::atan2(v, u) / (2.0 * std::numbers::pi);  // [-0.5, 0.5]
      if (hue < 0.0) hue += 1.0;
      // HSV to RGB with value 1.
      const double h6 = hue * 6.0;
      const int sector = static_cast<int>(h6) % 6;
      const double f = h6 - std::floor(h6);
      const double p = 1.0 - s, q = 1.0 - s * f, t = 1.0 - s * (1.0 - f);
      double r = 1, g = 1, b = 1;
      switch (sector) {
        case 0: r = 1; g = t; b = p; break;
        case 1: r = q; g = 1; b = p; break;
        case 2: r = p; g = 1; b = t; break;
        case 3: r = p; g = q; b = 1; break;
        case 4: r = t; g = p; b = 1; break;
        default: r = 1; g = p; b = q; break;
      }
      img.pixels.push_back(to_byte(r));
      img.pixels.push_back(to_byte(g));
      img.pixels.push_back(to_byte(b));
    }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

void dump_flow_visualization(const motion::FlowField& flow, const std::string& path) {
  write_file(path, encode_ppm(flow_to_rgb(flow)));
}

}  // namespace flowcodec::eval
