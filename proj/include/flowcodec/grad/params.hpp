// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tape.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flowcodec::grad {

// Named trainable tensors. Ordered by name so iteration, digests and files are stable.
using ParamSet = std::map<std::string, Tensor>;
using GradSet = std::map<std::string, Tensor>;

// Parameters placed on a tape for one forward pass.
class BoundParams {
 public:
  BoundParams(Tape& tape, const ParamSet& params, bool requires_grad);
  explicit BoundParams(std::map<std::string, Var> vars) : vars_(std::move(vars)) {}

  const Var& operator[](const std::string& name) const;
  GradSet gradients(const Var& loss) const;

 private:
  std::map<std::string, Var> vars_;
};

// FNV-1a over names, extents and value bytes.
std::uint64_t digest(const ParamSet& params);

// Copies every entry of `from` whose name starts with `prefix` into `to`.
void merge_prefixed(ParamSet& to, const ParamSet& from, const std::string& prefix);
ParamSet select_prefixed(const ParamSet& from, const std::string& prefix);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment update applied in place.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
  void step(ParamSet& params, const GradSet& grads, double learning_rate);

 private:
  AdamConfig cfg_;
  std::map<std::string, std::pair<Eigen::ArrayXd, Eigen::ArrayXd>> moments_;
  long steps_ = 0;
};

}  // namespace flowcodec::grad

namespace flowcodec::grad {

// Piecewise-constant learning rate: `initial`, multiplied by each factor whose iteration
// threshold has been reached.
struct StepSchedule {
  double initial = 1e-3;
  std::vector<std::pair<long, double>> decays;

  double at(long iteration) const {
    double lr = initial;
    for (const auto& [from, factor] : decays)
      if (iteration >= from) lr *= factor;
    return lr;
  }
};

}  // namespace flowcodec::grad
