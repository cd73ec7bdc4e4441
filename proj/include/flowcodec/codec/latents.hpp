// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tensor.hpp"

#include <cstdint>

namespace flowcodec::codec {

// Coder alphabet. Rounded latents are clamped into it so whatever the encoder evaluates
// can actually be written.
inline constexpr int kSymbolMin = -64;
inline constexpr int kSymbolMax = 63;

enum class QuantState { raw, rounded, noised };
enum class QuantMode { round, noise };

struct Latent {
  grad::Tensor values;
  QuantState state = QuantState::raw;
};

struct LatentPair {
  Latent y;
  Latent z;
};

// Round: nearest integer, ties away from zero, clamped to the alphabet.
// Noise: adds U(-0.5, 0.5) drawn from `seed`. Only raw latents may be quantized.
Latent quantize(const Latent& latent, QuantMode mode, std::uint64_t seed = 0);

// Noise seeds inside a pass are derived per latent from the pass seed.
enum class LatentKind : std::uint64_t { y = 1, z = 2, g = 3 };
std::uint64_t noise_stream(std::uint64_t pass_seed, LatentKind kind);

grad::Tensor round_to_alphabet(const grad::Tensor& t);

const char* to_string(QuantState state);

}  // namespace flowcodec::codec
