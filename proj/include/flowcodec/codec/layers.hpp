// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/codec/model.hpp"
#include "flowcodec/grad/tape.hpp"

#include <string>
#include <vector>

namespace flowcodec::codec {

// down: 5x5 stride-2 conv; up: 3x3 stride-2 transposed conv (exact 2x); same: 3x3 conv.
enum class LayerKind { down, up, same };

struct LayerSpec {
  std::string name;
  LayerKind kind;
  int in;
  int out;
};

std::vector<LayerSpec> codec_layers(const CodecConfig& config);
grad::Extents weight_extents(const LayerSpec& layer);

inline int kernel_size(LayerKind k) { return k == LayerKind::down ? 5 : 3; }
inline std::string weight_name(const std::string& layer) { return "codec." + layer + ".w"; }
inline std::string bias_name(const std::string& layer) { return "codec." + layer + ".b"; }

}  // namespace flowcodec::codec
