// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/params.hpp"
#include "flowcodec/motion/frame.hpp"

#include <cstdint>
#include <string>

namespace flowcodec::motion {

struct FlowNetConfig {
  int levels = 3;
  int layers_per_level = 4;
  int hidden_channels = 16;
  int frame_channels = 1;

  // Every level sees (current, warped reference, upsampled coarser flow).
  int input_channels() const { return 2 * frame_channels + 2; }
  int divisor() const { return 1 << (levels - 1); }
};

// Coarse-to-fine residual flow estimator. Parameter names: "flow.l<level>.c<layer>.{w,b}".
struct FlowNet {
  FlowNetConfig config;
  grad::ParamSet params;

  static std::string weight_name(int level, int layer);
  static std::string bias_name(int level, int layer);
};

// He-style random kernels; the last layer of every level starts at zero so the initial
// network predicts zero flow.
FlowNet init_flownet(const FlowNetConfig& config, std::uint64_t seed);

// Level k flow = 2x upsampled level k+1 flow (values doubled) + predicted residual.
grad::Var estimate_flow(const grad::Var& current, const grad::Var& reference, const grad::BoundParams& params,
                        const FlowNetConfig& config);
FlowField estimate_flow(const Frame& current, const Frame& reference, const FlowNet& net);

}  // namespace flowcodec::motion
