// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/codec/model.hpp"
#include "flowcodec/codec/pass.hpp"

#include <functional>
#include <span>
#include <vector>

namespace flowcodec::codec {

inline constexpr double kDefaultLambdas[] = {256.0, 512.0, 1024.0, 2048.0};

struct TrainSample {
  motion::Frame current;
  motion::Frame reference;
};

struct TrainConfig {
  double lambda = 1024.0;
  long iterations = 1000;
  grad::StepSchedule learning_rate{1e-4, {}};
  int batch_size = 4;
  std::uint64_t seed = 0;
};

struct TrainLogEntry {
  long iteration;
  double loss;
  RDBreakdown mean_rd;
};
using TrainLogger = std::function<void(const TrainLogEntry&)>;

// Minimizes the noise-quantized RD loss over the codec parameters with Adam. The flow
// network is frozen; flows are estimated once per sample.
Codec train_end_to_end(Codec codec, const motion::FlowNet& flow, std::span<const TrainSample> dataset,
                       const TrainConfig& config, const TrainLogger& log = {});

// Mean noise-mode loss over a fixed batch (same noise each call for a given seed).
double batch_loss(const Codec& codec, const motion::FlowNet& flow, std::span<const TrainSample> batch, double lambda,
                  std::uint64_t seed);

}  // namespace flowcodec::codec
