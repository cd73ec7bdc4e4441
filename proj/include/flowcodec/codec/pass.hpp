// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/codec/latents.hpp"
#include "flowcodec/codec/model.hpp"
#include "flowcodec/codec/network.hpp"
#include "flowcodec/motion/frame.hpp"

#include <cstdint>

namespace flowcodec::codec {

struct RDBreakdown {
  double lambda = 0.0;
  double distortion = 0.0;  // MSE
  double bits_y = 0.0;
  double bits_z = 0.0;
  double bits_g = 0.0;
  double total = 0.0;

  // Same operation order as the loss graph, so totals agree bit-for-bit.
  static RDBreakdown make(double lambda, double distortion, double bits_y, double bits_z, double bits_g);
  double bits() const { return bits_y + bits_z + bits_g; }
};

// How each latent is quantized inside a pass.
//   inference (Dec_I): everything rounded.
//   optimization (Dec_T): y, z noised; g rounded.
//   training: everything noised.
struct DecodeOptions {
  QuantMode motion = QuantMode::round;
  QuantMode context = QuantMode::round;
  std::uint64_t seed = 0;
  bool zero_noise = false;

  static DecodeOptions inference() { return {}; }
  static DecodeOptions optimization(std::uint64_t seed, bool zero_noise = false) {
    return {QuantMode::noise, QuantMode::round, seed, zero_noise};
  }
  static DecodeOptions training(std::uint64_t seed) { return {QuantMode::noise, QuantMode::noise, seed, false}; }
};

struct PassGraph {
  grad::Var y_hat, z_hat;
  grad::Var flow;
  grad::Var context;
  grad::Var g, g_hat;
  grad::Var reconstruction;
  grad::Var distortion, bits_y, bits_z, bits_g;
  grad::Var total;

  RDBreakdown breakdown(double lambda) const;
};

// Quantizes y and z per options, decodes motion, extracts context, codes the current
// frame, and assembles the RD loss. Differentiable w.r.t. y and z in noise mode.
PassGraph decode_pass(const grad::Var& y, const grad::Var& z, const grad::Var& reference, const grad::Var& current,
                      const grad::BoundParams& params, const CodecConfig& cfg, double lambda,
                      const DecodeOptions& options);

struct PassResult {
  motion::Frame reconstruction;
  RDBreakdown rd;
  Latent y_hat, z_hat, g_hat;
  motion::FlowField flow;
  long floored_elements = 0;  // elements whose interval mass hit the probability floor
};

// Value-level pass on an inference tape. Latents must be raw.
PassResult decode_pass(const LatentPair& latents, const motion::Frame& reference, const motion::Frame& current,
                       const Codec& codec, double lambda, const DecodeOptions& options);

LatentPair encode_mv(const motion::FlowField& flow, const Codec& codec);

// Frame coding with a given context: g is quantized per mode and decoded.
struct FrameCoding {
  motion::Frame reconstruction;
  Latent g_hat;
  double bits_g = 0.0;
};
FrameCoding code_frame(const motion::Frame& current, const motion::Frame& reference, const motion::FlowField& flow,
                       const grad::Tensor& context, const Codec& codec, QuantMode mode, std::uint64_t seed);

grad::Tensor extract_context(const motion::Frame& reference, const motion::FlowField& flow, const Codec& codec);

struct BitEstimate {
  double bits = 0.0;
  long floored = 0;
};
BitEstimate gaussian_bits_estimate(const grad::Tensor& x, const grad::Tensor& mean, const grad::Tensor& scale_param);
BitEstimate mixture_bits_estimate(const grad::Tensor& x, const grad::Tensor& params);
// Quantized latents only.
BitEstimate bits_estimate(const Latent& latent, const grad::Tensor& mean, const grad::Tensor& scale_param);
BitEstimate bits_estimate(const Latent& latent, const grad::Tensor& mixture_params);

// Decoder-side stages: functions of decoded symbols and the reference only.
struct DecoderSide {
  grad::Tensor y_mean, y_scale_param;  // from z_hat
  motion::FlowField flow;              // from y_hat
  grad::Tensor context;
  grad::Tensor g_mean, g_scale_param;
};
void decode_hyper(const grad::Tensor& z_hat, const Codec& codec, DecoderSide& side);
void decode_motion(const grad::Tensor& y_hat, const motion::Frame& reference, const Codec& codec, DecoderSide& side);
motion::Frame decode_frame(const grad::Tensor& g_hat, const motion::Frame& reference, const DecoderSide& side,
                           const Codec& codec);

}  // namespace flowcodec::codec
