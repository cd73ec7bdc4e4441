// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/losses.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/motion/warp.hpp"

#include <stdexcept>

namespace flowcodec::motion {

using grad::Var;

Var epe(const Var& flow, const Var& label) { return grad::mean(grad::channel_norm(grad::sub(flow, label))); }

double epe(const FlowField& flow, const FlowField& label) {
  require_same_size(flow, label, "epe");
  grad::Tape tape(grad::Tape::Mode::inference);
  return epe(tape.constant(flow.components), tape.constant(label.components)).value().item();
}

Var mse(const Var& a, const Var& b) {
  Var d = grad::sub(a, b);
  return grad::mean(grad::mul(d, d));
}

Var me_loss(const Var& current, const Var& reference, const Var& flow, const Var& label, double lambda_me) {
  if (!(lambda_me > 0.0)) throw std::invalid_argument("me_loss: lambda_ME must be positive");
  return grad::add(epe(flow, label), grad::scale(mse(current, warp(reference, flow)), lambda_me));
}

double me_loss(const Frame& current, const Frame& reference, const FlowField& flow, const FlowField& label,
               double lambda_me) {
  require_same_size(current, reference, "me_loss");
  require_same_size(current, flow, "me_loss");
  require_same_size(flow, label, "me_loss");
  grad::Tape tape(grad::Tape::Mode::inference);
  return me_loss(tape.constant(current.samples), tape.constant(reference.samples), tape.constant(flow.components),
                 tape.constant(label.components), lambda_me)
      .value()
      .item();
}

}  // namespace flowcodec::motion
