// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/network.hpp"

#include "flowcodec/codec/layers.hpp"
#include "flowcodec/grad/ops.hpp"
#include "flowcodec/motion/warp.hpp"

namespace flowcodec::codec {

using grad::Var;

namespace {

Var down(const Var& x, const grad::BoundParams& p, const std::string& layer) {
  return grad::conv2d(x, p[weight_name(layer)], p[bias_name(layer)], 2, 2);
}

Var up(const Var& x, const grad::BoundParams& p, const std::string& layer) {
  return grad::conv_transpose2d(x, p[weight_name(layer)], p[bias_name(layer)], 2, 1, 1);
}

Var same(const Var& x, const grad::BoundParams& p, const std::string& layer) {
  return grad::conv2d(x, p[weight_name(layer)], p[bias_name(layer)], 1, 1);
}

GaussianParams split(const Var& both, int channels) {
  return {grad::slice_channels(both, 0, channels), grad::slice_channels(both, channels, channels)};
}

}  // namespace

Var mv_encode(const Var& flow, const grad::BoundParams& p, const CodecConfig&) {
  Var h = grad::leaky_relu(down(flow, p, "mv_enc.0"));
  h = grad::leaky_relu(down(h, p, "mv_enc.1"));
  return down(h, p, "mv_enc.2");
}

Var hyper_encode(const Var& y, const grad::BoundParams& p, const CodecConfig&) {
  return down(grad::leaky_relu(down(y, p, "hyper_enc.0")), p, "hyper_enc.1");
}

GaussianParams hyper_decode(const Var& z_hat, const grad::BoundParams& p, const CodecConfig& cfg) {
  return split(up(grad::leaky_relu(up(z_hat, p, "hyper_dec.0")), p, "hyper_dec.1"), cfg.y_channels);
}

Var mv_decode(const Var& y_hat, const grad::BoundParams& p, const CodecConfig&) {
  Var h = grad::leaky_relu(up(y_hat, p, "mv_dec.0"));
  h = grad::leaky_relu(up(h, p, "mv_dec.1"));
  return up(h, p, "mv_dec.2");
}

Var extract_context(const Var& reference, const Var& flow, const grad::BoundParams& p, const CodecConfig&) {
  Var features = grad::leaky_relu(same(reference, p, "ctx.feat"));
  return same(motion::warp(features, flow), p, "ctx.refine");
}

Var context_encode(const Var& current, const Var& context, const grad::BoundParams& p, const CodecConfig&) {
  Var h = grad::leaky_relu(down(grad::concat_channels({current, context}), p, "ctx_enc.0"));
  h = grad::leaky_relu(down(h, p, "ctx_enc.1"));
  return down(h, p, "ctx_enc.2");
}

GaussianParams temporal_prior(const Var& context, const grad::BoundParams& p, const CodecConfig& cfg) {
  Var h = grad::leaky_relu(down(context, p, "prior.0"));
  h = grad::leaky_relu(down(h, p, "prior.1"));
  return split(down(h, p, "prior.2"), cfg.g_channels);
}

Var context_decode(const Var& g_hat, const Var& context, const Var& reference, const Var& flow,
                   const grad::BoundParams& p, const CodecConfig&) {
  const Var pooled = grad::avgpool2x(grad::avgpool2x(grad::avgpool2x(context)));
  Var h = grad::leaky_relu(up(grad::concat_channels({g_hat, pooled}), p, "ctx_dec.0"));
  h = grad::leaky_relu(up(h, p, "ctx_dec.1"));
  h = grad::leaky_relu(up(h, p, "ctx_dec.2"));
  const Var residual = same(grad::concat_channels({h, context}), p, "ctx_dec.3");
  return grad::add(motion::warp(reference, flow), residual);
}

Var z_model(const grad::BoundParams& p) { return p["codec.zmodel.params"]; }

}  // namespace flowcodec::codec
