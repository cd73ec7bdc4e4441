// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/eval/synthetic.hpp"

#include "flowcodec/grad/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowcodec::eval {

using motion::Frame;

void SyntheticSpec::validate() const {
  if (width < 1 || height < 1 || channels < 1 || frames < 1)
    throw std::invalid_argument("synthetic video: extents and frame count must be positive");
  if (!(smoothing >= 0.0)) throw std::invalid_argument("synthetic video: smoothing must be >= 0");
  if (label_stride < 1 || label_precision < 1)
    throw std::invalid_argument("synthetic video: label stride and precision must be >= 1");
  for (const Translation& t : motion)
    if (!std::isfinite(t.horizontal) || !std::isfinite(t.vertical))
      throw std::invalid_argument("synthetic video: non-finite motion");
}

namespace {

double snap(double v, int precision) { return std::round(v * precision) / precision; }

// Separable Gaussian blur with clamped borders.
std::vector<double> blur(std::vector<double> img, int h, int w, double sigma) {
  if (sigma <= 0.0) return img;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= sum;
  auto at = [&](const std::vector<double>& a, int y, int x) {
    return a[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * at(img, y, x + i);
      tmp[static_cast<std::size_t>(y) * w + x] = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += k[static_cast<std::size_t>(i + r)] * at(tmp, y + i, x);
      img[static_cast<std::size_t>(y) * w + x] = s;
    }
  return img;
}

struct Canvas {
  int h = 0, w = 0;
  std::vector<std::vector<double>> planes;

  double sample(int c, double y, double x) const {
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    const int y0 = std::min(static_cast<int>(y), h - 2), x0 = std::min(static_cast<int>(x), w - 2);
    const double fy = y - y0, fx = x - x0;
    const auto& p = planes[static_cast<std::size_t>(c)];
    auto v = [&](int yy, int xx) { return p[static_cast<std::size_t>(yy) * w + xx]; };
    return (1 - fy) * ((1 - fx) * v(y0, x0) + fx * v(y0, x0 + 1)) + fy * ((1 - fx) * v(y0 + 1, x0) + fx * v(y0 + 1, x0 + 1));
  }
};

Canvas make_canvas(int h, int w, int channels, double sigma, std::uint64_t seed) {
  Canvas cv{h, w, {}};
  grad::Rng rng(seed);
  for (int c = 0; c < channels; ++c) {
    std::vector<double> noise(static_cast<std::size_t>(h) * w);
    for (double& v : noise) v = rng.uniform();
    noise = blur(std::move(noise), h, w, sigma);
    const auto [lo, hi] = std::minmax_element(noise.begin(), noise.end());
    const double span = std::max(*hi - *lo, 1e-12), base = *lo;
    for (double& v : noise) v = 0.1 + 0.8 * (v - base) / span;
    cv.planes.push_back(std::move(noise));
  }
  return cv;
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<Translation> steps(static_cast<std::size_t>(spec.frames));
  std::vector<double> cx(steps.size(), 0.0), cy(steps.size(), 0.0);
  double reach = 0.0;
  for (std::size_t t = 1; t < steps.size(); ++t) {
    if (!spec.motion.empty()) {
      const Translation& m = spec.motion[(t - 1) % spec.motion.size()];
      steps[t] = {snap(m.horizontal, spec.label_precision), snap(m.vertical, spec.label_precision)};
    }
    cx[t] = cx[t - 1] + steps[t].horizontal;
    cy[t] = cy[t - 1] + steps[t].vertical;
    reach = std::max({reach, std::abs(cx[t]), std::abs(cy[t])});
  }
  const int margin = static_cast<int>(std::ceil(reach)) + 2;
  const Canvas canvas =
      make_canvas(spec.height + 2 * margin, spec.width + 2 * margin, spec.channels, spec.smoothing, seed);

  SyntheticData out;
  out.video = {spec.width, spec.height, spec.channels, {}};
  for (std::size_t t = 0; t < steps.size(); ++t) {
    Frame f = Frame::zeros(spec.channels, spec.height, spec.width);
    for (int c = 0; c < spec.channels; ++c)
      for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
          f.samples.at(c, y, x) = canvas.sample(c, y + margin + cy[t], x + margin + cx[t]);
    out.video.frames.push_back(std::move(f));

    motion::MVLabelGrid g = motion::MVLabelGrid::zeros(spec.width, spec.height, spec.label_stride, spec.label_precision);
    const auto qh = static_cast<std::int16_t>(std::lround(steps[t].horizontal * spec.label_precision));
    const auto qv = static_cast<std::int16_t>(std::lround(steps[t].vertical * spec.label_precision));
    std::fill(g.horizontal.begin(), g.horizontal.end(), qh);
    std::fill(g.vertical.begin(), g.vertical.end(), qv);
    g.metadata = "synthetic translation";
    out.labels.push_back(std::move(g));
    out.flows.push_back(motion::FlowField::constant(spec.height, spec.width, steps[t].horizontal, steps[t].vertical));
  }
  return out;
}

std::vector<Translation> random_motion(int steps, double max_pel, std::uint64_t seed) {
  grad::Rng rng(seed);
  std::vector<Translation> out;
  for (int i = 0; i < steps; ++i)
    out.push_back({snap(rng.uniform(-max_pel, max_pel), 16), snap(rng.uniform(-max_pel, max_pel), 16)});
  return out;
}

std::vector<motion::FlowSample> flow_samples(const SyntheticData& data) {
  std::vector<motion::FlowSample> out;
  for (std::size_t t = 1; t < data.video.frames.size(); ++t)
    out.push_back({data.video.frames[t], data.video.frames[t - 1], data.labels[t]});
  return out;
}

}  // namespace flowcodec::eval
