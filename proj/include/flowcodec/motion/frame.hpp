// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tensor.hpp"

#include <vector>

namespace flowcodec::motion {

// Image samples as (C, H, W). Source frames hold values in [0, 1]; reconstructions may
// leave that range and are clamped only when written to 8-bit files.
struct Frame {
  grad::Tensor samples;

  Frame() = default;
  explicit Frame(grad::Tensor t);
  static Frame zeros(int channels, int height, int width) { return Frame(grad::Tensor::zeros({channels, height, width})); }

  int channels() const { return samples.channels(); }
  int height() const { return samples.height(); }
  int width() const { return samples.width(); }
};

// Dense motion in pixel units: channel 0 horizontal (positive right), channel 1 vertical
// (positive down). A flow displaces the reference toward the current frame.
struct FlowField {
  grad::Tensor components;

  FlowField() = default;
  explicit FlowField(grad::Tensor t);
  static FlowField zeros(int height, int width) { return FlowField(grad::Tensor::zeros({2, height, width})); }
  static FlowField constant(int height, int width, double horizontal, double vertical);

  int height() const { return components.height(); }
  int width() const { return components.width(); }
  double horizontal(int y, int x) const { return components.at(0, y, x); }
  double vertical(int y, int x) const { return components.at(1, y, x); }
};

struct Video {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<Frame> frames;
};

// Throws std::invalid_argument when the spatial extents of the two differ.
void require_same_size(const Frame& a, const Frame& b, const char* op);
void require_same_size(const Frame& frame, const FlowField& flow, const char* op);
void require_same_size(const FlowField& a, const FlowField& b, const char* op);

// Mean squared error over all channels jointly.
double mse(const Frame& a, const Frame& b);

// Peak 1.0; capped at 99 dB once the MSE drops below 1e-10.
inline constexpr double kPsnrCap = 99.0;
inline constexpr double kPsnrMseFloor = 1e-10;
double psnr(const Frame& a, const Frame& b);

}  // namespace flowcodec::motion
