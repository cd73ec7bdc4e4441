// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/bitstream/cdf.hpp"
#include "flowcodec/codec/pass.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace flowcodec::bitstream {

// Integer-valued latents of one inter frame, each inside the coder alphabet.
struct InterSymbols {
  grad::Tensor z_hat;
  grad::Tensor y_hat;
  grad::Tensor g_hat;
};

struct InterFrame {
  std::vector<std::uint8_t> payload;
  motion::Frame reconstruction;
  motion::FlowField flow;
  InterSymbols symbols;
};

// Codes z (per-channel factorized tables), then y (hyperprior Gaussians), then g
// (temporal-prior Gaussians) in one stream. The reconstruction is produced by the same
// decoder-side stages the decoder runs.
InterFrame encode_inter(const InterSymbols& symbols, const motion::Frame& reference, const codec::Codec& codec);
InterFrame decode_inter(std::span<const std::uint8_t> payload, const motion::Frame& reference,
                        const codec::Codec& codec);

// Sum of quantized code lengths of the symbols under the same tables the coder uses.
double quantized_code_length(const InterSymbols& symbols, const motion::Frame& reference, const codec::Codec& codec);

CdfTable z_table(const grad::Tensor& mixture_params, int channel);

}  // namespace flowcodec::bitstream
