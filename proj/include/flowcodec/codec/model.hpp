// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/params.hpp"
#include "flowcodec/motion/flownet.hpp"

#include <cstdint>
#include <string>

namespace flowcodec::codec {

struct CodecConfig {
  int frame_channels = 1;
  int y_channels = 32;
  int z_channels = 16;
  int g_channels = 48;
  int context_channels = 32;
  int mixture_components = 3;

  // y and g live on a /8 grid, z on a /32 grid.
  static constexpr int divisor() { return 32; }
};

// Kernel and entropy-model tensors, named "codec.<block>.<layer>.{w,b}" plus
// "codec.zmodel.params".
struct Codec {
  CodecConfig config;
  grad::ParamSet params;
};

Codec init_codec(const CodecConfig& config, std::uint64_t seed);

// Throws unless every expected tensor is present with the expected extents.
void validate_codec(const Codec& codec);

// Flow estimator, codec, and the multiplier the codec was trained for.
struct Model {
  motion::FlowNet flow;
  Codec codec;
  double lambda = 0.0;
};

// Checkpoint layout: "flow.*", "codec.*", and "meta.{lambda,flow_config,codec_config}".
grad::ParamSet to_checkpoint(const Model& model);
Model from_checkpoint(const grad::ParamSet& params);
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

// Throws with a readable message when frame extents cannot be coded.
void require_codable(int height, int width, const motion::FlowNetConfig& flow);

}  // namespace flowcodec::codec
