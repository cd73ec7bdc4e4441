// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tape.hpp"

#include <initializer_list>
#include <span>

namespace flowcodec::grad {

// Elementwise arithmetic on equal extents.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, Scalar factor);
Var leaky_relu(const Var& x, Scalar slope = 0.1);

// Sequential row-major reductions to a rank-0 scalar.
Var sum(const Var& x);
Var mean(const Var& x);

// Channel-axis plumbing for (C, H, W) tensors.
Var concat_channels(std::span<const Var> parts);
inline Var concat_channels(std::initializer_list<Var> parts) {
  return concat_channels(std::span<const Var>(parts.begin(), parts.size()));
}
Var slice_channels(const Var& x, int begin, int count);
// Per-pixel Euclidean norm over channels: (C, H, W) -> (1, H, W). Subgradient 0 at the origin.
Var channel_norm(const Var& x);

// x: (C, H, W); weight: (O, C, k, k); bias: (O). Zero padding; stride 1 or 2.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
// x: (C, H, W); weight: (C, O, k, k); bias: (O). Output extent (H-1)*stride - 2*pad + k + output_pad.
Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad, int output_pad);

// Bilinear 2x upsampling with half-pixel centers and edge clamping.
Var upsample2x(const Var& x);
// 2x2 mean pooling; spatial extents must be even.
Var avgpool2x(const Var& x);

// Backward warp: out(c, y, x) = bilinear sample of image(c) at (x + flow(0,y,x), y + flow(1,y,x)).
// Sample coordinates outside the image are clamped to the border.
Var grid_sample(const Var& image, const Var& flow);

// x + noise; the noise is a constant for differentiation.
Var add_noise(const Var& x, const Tensor& noise);
// Nearest integer, ties away from zero. Gradient-free: the output never requires grad.
Var round_values(const Var& x);

// Per-element code length in bits, -log2 of the mass on [x-0.5, x+0.5], with the mass
// floored at 2^-16 (zero gradient where the floor is active).
//
// Gaussian: mean and scale_param share x's extents; scale = 0.11 + softplus(scale_param).
Var gaussian_bits(const Var& x, const Var& mean, const Var& scale_param);
// Factorized model: per channel a mixture of K logistics. x: (C, H, W); params: (C, 3K) laid
// out as K mixture logits, K locations, K log-scales.
Var logistic_mixture_bits(const Var& x, const Var& params);

}  // namespace flowcodec::grad
