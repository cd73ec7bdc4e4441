// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/frame.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowcodec::motion {

using grad::describe;

Frame::Frame(grad::Tensor t) : samples(std::move(t)) {
  if (samples.rank() != 3) throw std::invalid_argument("Frame expects (C,H,W), got " + describe(samples.extents()));
}

FlowField::FlowField(grad::Tensor t) : components(std::move(t)) {
  if (components.rank() != 3 || components.channels() != 2) {
    throw std::invalid_argument("FlowField expects (2,H,W), got " + describe(components.extents()));
  }
}

FlowField FlowField::constant(int height, int width, double horizontal, double vertical) {
  FlowField f = zeros(height, width);
  const Eigen::Index plane = static_cast<Eigen::Index>(height) * width;
  f.components.values().head(plane).setConstant(horizontal);
  f.components.values().tail(plane).setConstant(vertical);
  return f;
}

namespace {
[[noreturn]] void mismatch(const char* op, int h1, int w1, int h2, int w2) {
  throw std::invalid_argument(std::string(op) + ": size mismatch " + std::to_string(w1) + "x" + std::to_string(h1) +
                              " vs " + std::to_string(w2) + "x" + std::to_string(h2));
}
}  // namespace

void require_same_size(const Frame& a, const Frame& b, const char* op) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels())
    mismatch(op, a.height(), a.width(), b.height(), b.width());
}

void require_same_size(const Frame& frame, const FlowField& flow, const char* op) {
  if (frame.height() != flow.height() || frame.width() != flow.width())
    mismatch(op, frame.height(), frame.width(), flow.height(), flow.width());
}

void require_same_size(const FlowField& a, const FlowField& b, const char* op) {
  if (a.height() != b.height() || a.width() != b.width()) mismatch(op, a.height(), a.width(), b.height(), b.width());
}

double mse(const Frame& a, const Frame& b) {
  grad::require_same_extents(a.samples, b.samples, "mse");
  const auto d = a.samples.values() - b.samples.values();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) acc += d[i] * d[i];
  return acc / static_cast<double>(d.size());
}

double psnr(const Frame& a, const Frame& b) {
  const double e = mse(a, b);
  if (e < kPsnrMseFloor) return kPsnrCap;
  return -10.0 * std::log10(e);
}

}  // namespace flowcodec::motion
