// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tape.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flowcodec::grad {

// Builds a scalar loss on `tape` from the given leaves (one Var per leaf tensor).
using GraphBuilder = std::function<Var(Tape& tape, std::span<const Var> leaves)>;

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-4;
  // Coordinates probed per leaf; 0 probes every element. Sampled coordinates are seeded.
  int max_coordinates = 0;
  std::uint64_t seed = 0;
  // Denominator floor for the relative error.
  double magnitude_floor = 1e-8;
};

struct GradCheckEntry {
  std::size_t leaf;
  Eigen::Index index;
  double analytic;
  double numeric;
  double relative_error;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::vector<GradCheckEntry> failures;

  bool passed() const { return failures.empty(); }
  std::string summary() const;
};

// Compares reverse-mode gradients against two-sided finite differences.
GradCheckReport check_gradients(const GraphBuilder& build, const std::vector<Tensor>& leaves,
                                const GradCheckOptions& options = {});

}  // namespace flowcodec::grad
