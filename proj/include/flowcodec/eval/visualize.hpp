// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/motion/frame.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flowcodec::eval {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // interleaved RGB, row-major
};

// Nearest-rank 99th percentile of the per-pixel flow magnitudes.
double magnitude_p99(const motion::FlowField& flow);

// Hue from the flow direction, saturation from the magnitude over the 99th percentile
// (clipped at 1), full value; zero motion is white.
RgbImage flow_to_rgb(const motion::FlowField& flow);

std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
void dump_flow_visualization(const motion::FlowField& flow, const std::string& path);

}  // namespace flowcodec::eval
