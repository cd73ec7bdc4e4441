// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/motion/flownet.hpp"
#include "flowcodec/motion/labels.hpp"
#include "flowcodec/motion/losses.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace flowcodec::motion {

struct FlowSample {
  Frame current;
  Frame reference;
  MVLabelGrid label;
};

enum class UpdateRule { adam, plain_gradient };

struct FinetuneConfig {
  double lambda_me = kDefaultLambdaME;
  long iterations = 1000;
  grad::StepSchedule learning_rate{1e-4, {}};
  int batch_size = 4;
  std::uint64_t seed = 0;
  UpdateRule update = UpdateRule::adam;
};

struct FinetuneLogEntry {
  long epoch;
  long iteration;  // iterations completed so far
  double mean_loss;
};

using FinetuneLogger = std::function<void(const FinetuneLogEntry&)>;

// Gradient descent of the flow network on me_loss against densified labels. Batches are
// drawn from a per-epoch seeded shuffle. Throws std::runtime_error naming the iteration
// when the loss becomes non-finite.
FlowNet finetune_flow(FlowNet net, std::span<const FlowSample> dataset, const FinetuneConfig& config,
                      const FinetuneLogger& log = {});

// Loss and parameter gradients of one batch (mean of per-sample me_loss).
struct BatchGradient {
  double loss;
  grad::GradSet gradients;
};
BatchGradient me_loss_gradient(const FlowNet& net, std::span<const FlowSample* const> batch, double lambda_me);

struct FlowQuality {
  double epe = 0.0;       // mean over samples
  double warp_mse = 0.0;  // mean over samples of MSE(current, warp(reference, flow))
};
FlowQuality assess_flow(const FlowNet& net, std::span<const FlowSample> dataset);

}  // namespace flowcodec::motion
