// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/motion/finetune.hpp"
#include "flowcodec/motion/frame.hpp"
#include "flowcodec/motion/labels.hpp"

#include <cstdint>
#include <vector>

namespace flowcodec::eval {

struct Translation {
  double horizontal = 0.0;  // pixels, snapped to 1/16 pel
  double vertical = 0.0;
};

struct SyntheticSpec {
  int width = 64;
  int height = 64;
  int channels = 1;
  int frames = 24;
  // motion[t - 1] moves frame t - 1 to frame t; shorter programs repeat cyclically,
  // an empty program means a static scene.
  std::vector<Translation> motion;
  double smoothing = 2.0;  // Gaussian blur sigma of the noise texture, pixels
  int label_stride = 4;
  int label_precision = 16;

  void validate() const;
};

// labels[t] and flows[t] describe frame t against frame t - 1, in the warp convention
// frame_t(x, y) = frame_{t-1}(x + u, y + v); index 0 holds zero motion.
struct SyntheticData {
  motion::Video video;
  std::vector<motion::MVLabelGrid> labels;
  std::vector<motion::FlowField> flows;
};

SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// A random program of translations with components in [-max_pel, max_pel], on the 1/16 grid.
std::vector<Translation> random_motion(int steps, double max_pel, std::uint64_t seed);

// Consecutive frame pairs with their labels, for flow fine-tuning.
std::vector<motion::FlowSample> flow_samples(const SyntheticData& data);

}  // namespace flowcodec::eval
