// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tensor.hpp"

#include <cstdint>
#include <random>

namespace flowcodec::grad {

// Derives an independent stream seed; used to give every (seed, iteration, stream) its own draw.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// mt19937_64 with portable conversions (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// i.i.d. U(-0.5, 0.5).
Tensor uniform_noise(const Extents& extents, std::uint64_t seed);
Tensor normal_tensor(const Extents& extents, double stddev, Rng& rng);

}  // namespace flowcodec::grad
