// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/labels.hpp"

#include <stdexcept>

namespace flowcodec::motion {

MVLabelGrid MVLabelGrid::zeros(int frame_width, int frame_height, int stride, int precision) {
  if (stride < 1 || precision < 1) throw std::invalid_argument("MV label grid: stride and precision must be >= 1");
  MVLabelGrid g;
  g.frame_width = frame_width;
  g.frame_height = frame_height;
  g.stride = stride;
  g.precision = precision;
  const auto cells = static_cast<std::size_t>(g.grid_width()) * g.grid_height();
  g.horizontal.assign(cells, 0);
  g.vertical.assign(cells, 0);
  return g;
}

void MVLabelGrid::validate() const {
  if (frame_width <= 0 || frame_height <= 0) throw std::invalid_argument("MV label grid: non-positive frame extents");
  if (stride < 1) throw std::invalid_argument("MV label grid: stride must be >= 1");
  if (precision < 1) throw std::invalid_argument("MV label grid: precision must be >= 1");
  const auto cells = static_cast<std::size_t>(grid_width()) * grid_height();
  if (horizontal.size() != cells || vertical.size() != cells) {
    throw std::invalid_argument("MV label grid: expected " + std::to_string(cells) + " cells, got " +
                                std::to_string(horizontal.size()) + "/" + std::to_string(vertical.size()));
  }
}

FlowField densify_labels(const MVLabelGrid& grid) {
  grid.validate();
  FlowField flow = FlowField::zeros(grid.frame_height, grid.frame_width);
  const double p = grid.precision;
  for (int y = 0; y < grid.frame_height; ++y) {
    for (int x = 0; x < grid.frame_width; ++x) {
      const std::size_t c = grid.cell(x / grid.stride, y / grid.stride);
      flow.components.at(0, y, x) = grid.horizontal[c] / p;
      flow.components.at(1, y, x) = grid.vertical[c] / p;
    }
  }
  return flow;
}

grad::Tensor block_subsample(const FlowField& flow, int stride) {
  if (stride < 1) throw std::invalid_argument("block_subsample: stride must be >= 1");
  const int gh = (flow.height() + stride - 1) / stride;
  const int gw = (flow.width() + stride - 1) / stride;
  grad::Tensor out({2, gh, gw});
  for (int c = 0; c < 2; ++c)
    for (int gy = 0; gy < gh; ++gy)
      for (int gx = 0; gx < gw; ++gx) out.at(c, gy, gx) = flow.components.at(c, gy * stride, gx * stride);
  return out;
}

}  // namespace flowcodec::motion
