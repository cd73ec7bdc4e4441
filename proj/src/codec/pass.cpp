// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/pass.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/losses.hpp"

#include <stdexcept>

namespace flowcodec::codec {

using grad::Tensor;
using grad::Var;

RDBreakdown RDBreakdown::make(double lambda, double distortion, double bits_y, double bits_z, double bits_g) {
  RDBreakdown rd{lambda, distortion, bits_y, bits_z, bits_g, 0.0};
  rd.total = lambda * distortion + bits_y + bits_z + bits_g;
  return rd;
}

RDBreakdown PassGraph::breakdown(double lambda) const {
  RDBreakdown rd{lambda,
                 distortion.value().item(),
                 bits_y.value().item(),
                 bits_z.value().item(),
                 bits_g.value().item(),
                 total.value().item()};
  return rd;
}

namespace {

Var quantize_var(const Var& x, QuantMode mode, const DecodeOptions& o, LatentKind kind) {
  if (mode == QuantMode::round) return x.tape().constant(round_to_alphabet(x.value()));
  Tensor noise = o.zero_noise ? Tensor::zeros_like(x.value())
                              : grad::uniform_noise(x.extents(), noise_stream(o.seed, kind));
  return grad::add_noise(x, noise);
}

Var gaussian_total(const Var& x, const GaussianParams& m) { return grad::sum(grad::gaussian_bits(x, m.mean, m.scale_param)); }

motion::FlowField flow_of(const Var& v) { return motion::FlowField(v.value()); }

}  // namespace

PassGraph decode_pass(const Var& y, const Var& z, const Var& reference, const Var& current,
                      const grad::BoundParams& params, const CodecConfig& cfg, double lambda,
                      const DecodeOptions& options) {
  PassGraph g;
  g.y_hat = quantize_var(y, options.motion, options, LatentKind::y);
  g.z_hat = quantize_var(z, options.motion, options, LatentKind::z);
  const GaussianParams y_model = hyper_decode(g.z_hat, params, cfg);
  g.flow = mv_decode(g.y_hat, params, cfg);
  g.context = extract_context(reference, g.flow, params, cfg);
  g.g = context_encode(current, g.context, params, cfg);
  g.g_hat = quantize_var(g.g, options.context, options, LatentKind::g);
  const GaussianParams g_model = temporal_prior(g.context, params, cfg);
  g.reconstruction = context_decode(g.g_hat, g.context, reference, g.flow, params, cfg);

  g.distortion = motion::mse(current, g.reconstruction);
  g.bits_y = gaussian_total(g.y_hat, y_model);
  g.bits_z = grad::sum(grad::logistic_mixture_bits(g.z_hat, z_model(params)));
  g.bits_g = gaussian_total(g.g_hat, g_model);
  g.total = grad::add(grad::add(grad::add(grad::scale(g.distortion, lambda), g.bits_y), g.bits_z), g.bits_g);
  return g;
}

PassResult decode_pass(const LatentPair& latents, const motion::Frame& reference, const motion::Frame& current,
                       const Codec& codec, double lambda, const DecodeOptions& options) {
  if (latents.y.state != QuantState::raw || latents.z.state != QuantState::raw)
    throw std::logic_error("decode_pass: latents must be raw");
  motion::require_same_size(reference, current, "decode_pass");
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const PassGraph g = decode_pass(tape.constant(latents.y.values), tape.constant(latents.z.values),
                                  tape.constant(reference.samples), tape.constant(current.samples), p, codec.config,
                                  lambda, options);
  auto state = [](QuantMode m) { return m == QuantMode::round ? QuantState::rounded : QuantState::noised; };
  PassResult r;
  r.reconstruction = motion::Frame(g.reconstruction.value());
  r.rd = g.breakdown(lambda);
  r.y_hat = {g.y_hat.value(), state(options.motion)};
  r.z_hat = {g.z_hat.value(), state(options.motion)};
  r.g_hat = {g.g_hat.value(), state(options.context)};
  r.flow = flow_of(g.flow);
  // Recount floored elements at the value level.
  grad::Tape side(grad::Tape::Mode::inference);
  const grad::BoundParams sp(side, codec.params, false);
  const GaussianParams ym = hyper_decode(side.constant(r.z_hat.values), sp, codec.config);
  const GaussianParams gm = temporal_prior(side.constant(g.context.value()), sp, codec.config);
  r.floored_elements = gaussian_bits_estimate(r.y_hat.values, ym.mean.value(), ym.scale_param.value()).floored +
                       mixture_bits_estimate(r.z_hat.values, sp["codec.zmodel.params"].value()).floored +
                       gaussian_bits_estimate(r.g_hat.values, gm.mean.value(), gm.scale_param.value()).floored;
  return r;
}

LatentPair encode_mv(const motion::FlowField& flow, const Codec& codec) {
  if (flow.height() % CodecConfig::divisor() != 0 || flow.width() % CodecConfig::divisor() != 0)
    throw std::invalid_argument("encode_mv: flow extents must be divisible by " +
                                std::to_string(CodecConfig::divisor()));
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const Var y = mv_encode(tape.constant(flow.components), p, codec.config);
  const Var z = hyper_encode(y, p, codec.config);
  return {{y.value(), QuantState::raw}, {z.value(), QuantState::raw}};
}

Tensor extract_context(const motion::Frame& reference, const motion::FlowField& flow, const Codec& codec) {
  motion::require_same_size(reference, flow, "extract_context");
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  return extract_context(tape.constant(reference.samples), tape.constant(flow.components), p, codec.config).value();
}

FrameCoding code_frame(const motion::Frame& current, const motion::Frame& reference, const motion::FlowField& flow,
                       const Tensor& context, const Codec& codec, QuantMode mode, std::uint64_t seed) {
  motion::require_same_size(current, reference, "code_frame");
  motion::require_same_size(current, flow, "code_frame");
  if (context.rank() != 3 || context.height() != current.height() || context.width() != current.width())
    throw std::invalid_argument("code_frame: context extents " + grad::describe(context.extents()) +
                                " do not match the frame");
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const Var ctx = tape.constant(context);
  DecodeOptions o;
  o.seed = seed;
  const Var g_hat =
      quantize_var(context_encode(tape.constant(current.samples), ctx, p, codec.config), mode, o, LatentKind::g);
  const GaussianParams gm = temporal_prior(ctx, p, codec.config);
  const Var rec = context_decode(g_hat, ctx, tape.constant(reference.samples), tape.constant(flow.components), p,
                                 codec.config);
  FrameCoding out;
  out.reconstruction = motion::Frame(rec.value());
  out.g_hat = {g_hat.value(), mode == QuantMode::round ? QuantState::rounded : QuantState::noised};
  out.bits_g = gaussian_total(g_hat, gm).value().item();
  return out;
}

BitEstimate gaussian_bits_estimate(const Tensor& x, const Tensor& mean, const Tensor& scale_param) {
  grad::require_same_extents(x, mean, "gaussian_bits_estimate");
  grad::require_same_extents(x, scale_param, "gaussian_bits_estimate");
  grad::Tape tape(grad::Tape::Mode::inference);
  const Var bits = grad::gaussian_bits(tape.constant(x), tape.constant(mean), tape.constant(scale_param));
  BitEstimate e;
  e.bits = grad::sum(bits).value().item();
  e.floored = (bits.value().values() >= 16.0).count();
  return e;
}

BitEstimate mixture_bits_estimate(const Tensor& x, const Tensor& params) {
  grad::Tape tape(grad::Tape::Mode::inference);
  const Var bits = grad::logistic_mixture_bits(tape.constant(x), tape.constant(params));
  BitEstimate e;
  e.bits = grad::sum(bits).value().item();
  e.floored = (bits.value().values() >= 16.0).count();
  return e;
}

namespace {
void require_quantized(const Latent& l) {
  if (l.state == QuantState::raw) throw std::logic_error("bits_estimate: latent must be rounded or noised");
}
}  // namespace

BitEstimate bits_estimate(const Latent& latent, const Tensor& mean, const Tensor& scale_param) {
  require_quantized(latent);
  return gaussian_bits_estimate(latent.values, mean, scale_param);
}

BitEstimate bits_estimate(const Latent& latent, const Tensor& mixture_params) {
  require_quantized(latent);
  return mixture_bits_estimate(latent.values, mixture_params);
}

void decode_hyper(const Tensor& z_hat, const Codec& codec, DecoderSide& side) {
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const GaussianParams m = hyper_decode(tape.constant(z_hat), p, codec.config);
  side.y_mean = m.mean.value();
  side.y_scale_param = m.scale_param.value();
}

void decode_motion(const Tensor& y_hat, const motion::Frame& reference, const Codec& codec, DecoderSide& side) {
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const Var flow = mv_decode(tape.constant(y_hat), p, codec.config);
  const Var ctx = extract_context(tape.constant(reference.samples), flow, p, codec.config);
  const GaussianParams m = temporal_prior(ctx, p, codec.config);
  side.flow = flow_of(flow);
  side.context = ctx.value();
  side.g_mean = m.mean.value();
  side.g_scale_param = m.scale_param.value();
}

motion::Frame decode_frame(const Tensor& g_hat, const motion::Frame& reference, const DecoderSide& side,
                           const Codec& codec) {
  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const Var rec = context_decode(tape.constant(g_hat), tape.constant(side.context), tape.constant(reference.samples),
                                 tape.constant(side.flow.components), p, codec.config);
  return motion::Frame(rec.value());
}

}  // namespace flowcodec::codec
