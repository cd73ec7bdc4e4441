// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/warp.hpp"

#include "flowcodec/grad/ops.hpp"

namespace flowcodec::motion {

Frame warp(const Frame& reference, const FlowField& flow) {
  require_same_size(reference, flow, "warp");
  grad::Tape tape(grad::Tape::Mode::inference);
  return Frame(warp(tape.constant(reference.samples), tape.constant(flow.components)).value());
}

grad::Var warp(const grad::Var& reference, const grad::Var& flow) { return grad::grid_sample(reference, flow); }

}  // namespace flowcodec::motion
