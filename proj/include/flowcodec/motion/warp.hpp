// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tape.hpp"
#include "flowcodec/motion/frame.hpp"

namespace flowcodec::motion {

// out(x, y) = bilinear sample of reference at (x + v_i(x, y), y + v_j(x, y)), border-clamped.
Frame warp(const Frame& reference, const FlowField& flow);
grad::Var warp(const grad::Var& reference, const grad::Var& flow);

}  // namespace flowcodec::motion
