// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tape.hpp"
#include "flowcodec/motion/frame.hpp"

namespace flowcodec::motion {

inline constexpr double kDefaultLambdaME = 100.0;

// Mean over pixels of the Euclidean endpoint distance between two flows.
double epe(const FlowField& flow, const FlowField& label);
grad::Var epe(const grad::Var& flow, const grad::Var& label);

grad::Var mse(const grad::Var& a, const grad::Var& b);

// epe(flow, label) + lambda_me * MSE(current, warp(reference, flow)).
double me_loss(const Frame& current, const Frame& reference, const FlowField& flow, const FlowField& label,
               double lambda_me = kDefaultLambdaME);
grad::Var me_loss(const grad::Var& current, const grad::Var& reference, const grad::Var& flow, const grad::Var& label,
                  double lambda_me = kDefaultLambdaME);

}  // namespace flowcodec::motion
