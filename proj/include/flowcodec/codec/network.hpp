// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/codec/model.hpp"
#include "flowcodec/grad/tape.hpp"

namespace flowcodec::codec {

// Graph-level network stages. Each takes parameters already bound to the tape of its
// inputs.

struct GaussianParams {
  grad::Var mean;
  grad::Var scale_param;
};

// flow (2, H, W) -> y (C_y, H/8, W/8)
grad::Var mv_encode(const grad::Var& flow, const grad::BoundParams& p, const CodecConfig& cfg);
// y -> z (C_z, H/32, W/32)
grad::Var hyper_encode(const grad::Var& y, const grad::BoundParams& p, const CodecConfig& cfg);
// z_hat -> entropy parameters for y
GaussianParams hyper_decode(const grad::Var& z_hat, const grad::BoundParams& p, const CodecConfig& cfg);
// y_hat -> decoded flow (2, H, W)
grad::Var mv_decode(const grad::Var& y_hat, const grad::BoundParams& p, const CodecConfig& cfg);
// Features of the reference, warped by the decoded flow, then refined: (C_ctx, H, W).
grad::Var extract_context(const grad::Var& reference, const grad::Var& flow, const grad::BoundParams& p,
                          const CodecConfig& cfg);
// (current ⊕ context) -> g (C_g, H/8, W/8)
grad::Var context_encode(const grad::Var& current, const grad::Var& context, const grad::BoundParams& p,
                         const CodecConfig& cfg);
// Entropy parameters for g from the context alone.
GaussianParams temporal_prior(const grad::Var& context, const grad::BoundParams& p, const CodecConfig& cfg);
// Reconstruction = warp(reference, flow) + decoder(g_hat ⊕ pooled context, context).
grad::Var context_decode(const grad::Var& g_hat, const grad::Var& context, const grad::Var& reference,
                         const grad::Var& flow, const grad::BoundParams& p, const CodecConfig& cfg);

grad::Var z_model(const grad::BoundParams& p);

}  // namespace flowcodec::codec
