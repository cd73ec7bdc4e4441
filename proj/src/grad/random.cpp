// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/random.hpp"

#include <cmath>

namespace flowcodec::grad {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

Tensor uniform_noise(const Extents& extents, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(extents);
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = rng.uniform() - 0.5;
  return t;
}

Tensor normal_tensor(const Extents& extents, double stddev, Rng& rng) {
  Tensor t(extents);
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = stddev * rng.normal();
  return t;
}

}  // namespace flowcodec::grad
