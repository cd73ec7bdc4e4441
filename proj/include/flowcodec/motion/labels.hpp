// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/motion/frame.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flowcodec::motion {

// Block motion from a traditional encoder, sampled every `stride` pixels and stored in
// 1/`precision` pel integer units.
struct MVLabelGrid {
  int frame_width = 0;
  int frame_height = 0;
  int stride = 4;
  int precision = 16;
  std::vector<std::int16_t> horizontal;  // row-major over the grid
  std::vector<std::int16_t> vertical;
  std::string metadata;

  static MVLabelGrid zeros(int frame_width, int frame_height, int stride = 4, int precision = 16);

  int grid_width() const { return (frame_width + stride - 1) / stride; }
  int grid_height() const { return (frame_height + stride - 1) / stride; }
  std::size_t cell(int gx, int gy) const { return static_cast<std::size_t>(gy) * grid_width() + gx; }

  // Throws std::invalid_argument when extents or cell counts are inconsistent.
  void validate() const;
};

// Nearest-neighbour upsampling by the grid stride, then division by the precision.
FlowField densify_labels(const MVLabelGrid& grid);

// Samples the flow at each grid cell's top-left pixel: (2, grid_height, grid_width).
grad::Tensor block_subsample(const FlowField& flow, int stride);

}  // namespace flowcodec::motion
