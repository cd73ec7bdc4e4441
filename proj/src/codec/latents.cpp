// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/latents.hpp"

#include "flowcodec/grad/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowcodec::codec {

grad::Tensor round_to_alphabet(const grad::Tensor& t) {
  grad::Tensor out = t;
  // std::round already rounds halves away from zero. Adding +0.0 turns -0.0 into +0.0 so
  // rounded latents match decoded symbols bit-for-bit.
  for (auto& v : out.values())
    v = std::clamp(std::round(v), static_cast<double>(kSymbolMin), static_cast<double>(kSymbolMax)) + 0.0;
  return out;
}

Latent quantize(const Latent& latent, QuantMode mode, std::uint64_t seed) {
  if (latent.state != QuantState::raw)
    throw std::logic_error(std::string("quantize: latent is already ") + to_string(latent.state));
  if (mode == QuantMode::round) return {round_to_alphabet(latent.values), QuantState::rounded};
  grad::Tensor out = latent.values;
  out.values() += grad::uniform_noise(out.extents(), seed).values();
  return {std::move(out), QuantState::noised};
}

std::uint64_t noise_stream(std::uint64_t pass_seed, LatentKind kind) {
  return grad::mix_seed(pass_seed, static_cast<std::uint64_t>(kind));
}

const char* to_string(QuantState state) {
  switch (state) {
    case QuantState::raw: return "raw";
    case QuantState::rounded: return "rounded";
    case QuantState::noised: return "noised";
  }
  return "?";
}

}  // namespace flowcodec::codec
