// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/codec/model.hpp"
#include "flowcodec/codec/pass.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace flowcodec::online {

struct OptConfig {
  long iterations = 1500;
  grad::StepSchedule learning_rate{5e-3, {{1200, 0.5}}};
  std::uint64_t seed = 0;
  // Dec_I keep-best check every k-th iteration (the last iteration is always checked).
  int keep_best_every = 1;

  void validate() const;
};

double lr_schedule(long iteration, const OptConfig& cfg);

struct WindowConfig {
  int size = 2;
  std::vector<double> weights{1.0, 0.5, 0.2, 0.1};  // by offset from the window's first coded frame

  void validate() const;
};

struct OptTrace {
  std::vector<double> best_cost;  // best_cost[0] is the initial cost, then one entry per iteration
  long iterations_run = 0;
  long best_iteration = 0;  // 0 when the initial latents were never beaten
  long skipped = 0;         // iterations with a non-finite loss or gradient
};

struct OptResult {
  codec::LatentPair latents;  // rounded ŷ^op, ẑ^op
  codec::Latent g_hat;
  motion::Frame reconstruction;
  motion::FlowField flow;
  codec::RDBreakdown rd;          // of the coded frame, Dec_I
  codec::RDBreakdown initial_rd;  // before any update
  double cost = 0.0;              // minimized objective (window cost in window mode)
  double initial_cost = 0.0;
  OptTrace trace;
};

// Keep-best latent descent starting from the given raw latents.
OptResult optimize_latents(const codec::LatentPair& initial, const motion::Frame& current,
                           const motion::Frame& reference, const codec::Codec& codec, double lambda,
                           const OptConfig& cfg);

// Initializes from the flow network and the motion encoder, then optimize_latents.
OptResult optimize_single_frame(const motion::Frame& current, const motion::Frame& reference,
                                 const codec::Model& model, double lambda, const OptConfig& cfg);

// frames[0] is the frame being coded, frames[1..] the following raw frames; the window
// holds frames.size() + 1 frames including the reference. Only frames[0]'s latents are
// decision variables.
OptResult optimize_window(std::span<const motion::Frame> frames, const motion::Frame& reference,
                          const codec::Model& model, double lambda, const WindowConfig& wcfg, const OptConfig& cfg);

// Weighted multi-frame loss; per_frame[j] is weighted by weights[j].
double window_loss(std::span<const double> per_frame, std::span<const double> weights);

// Effective window at position frame_index (0 = intra frame) of a GOP: the configured
// size, shrunk to the frames left in the GOP counting the reference, never below 2.
int window_schedule(int gop_length, int frame_index, int window);

// Total optimizer iterations executed in this process.
std::uint64_t optimizer_iterations_total();

}  // namespace flowcodec::online
