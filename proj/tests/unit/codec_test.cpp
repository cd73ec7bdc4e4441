// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/pass.hpp"
#include "flowcodec/codec/train.hpp"
#include "flowcodec/grad/gradcheck.hpp"
#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flowcodec;
using namespace flowcodec::codec;
using grad::Tensor;
using motion::FlowField;
using motion::Frame;

namespace {

CodecConfig small_config() {
  CodecConfig c;
  c.y_channels = 6;
  c.z_channels = 4;
  c.g_channels = 8;
  c.context_channels = 6;
  return c;
}

Frame smooth_frame(int h, int w, double dx, double dy, double phase = 0.0) {
  Frame f = Frame::zeros(1, h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double u = x + dx, v = y + dy;
      f.samples.at(0, y, x) =
          0.5 + 0.25 * std::sin(0.37 * u + 0.21 * v + phase) + 0.1 * std::cos(0.13 * u - 0.41 * v);
    }
  return f;
}

FlowField random_flow(int h, int w, std::uint64_t seed, double stddev = 2.0) {
  grad::Rng rng(seed);
  return FlowField(grad::normal_tensor({2, h, w}, stddev, rng));
}

LatentPair integer_latents(const Codec& codec, int h, int w, std::uint64_t seed) {
  LatentPair l = encode_mv(random_flow(h, w, seed, 3.0), codec);
  l.y.values = round_to_alphabet(l.y.values);
  l.z.values = round_to_alphabet(l.z.values);
  return l;
}

double mass_to_log_scale(double half_width_logit) { return std::log(0.5 / half_width_logit); }

}  // namespace

TEST(EncodeMv, ShapesAndDeterminism) {
  const Codec codec = init_codec({}, 1);
  const FlowField flow = random_flow(64, 64, 2);
  const LatentPair a = encode_mv(flow, codec);
  EXPECT_EQ(a.y.values.extents(), (grad::Extents{32, 8, 8}));
  EXPECT_EQ(a.z.values.extents(), (grad::Extents{16, 2, 2}));
  EXPECT_EQ(a.y.state, QuantState::raw);
  const LatentPair b = encode_mv(flow, codec);
  EXPECT_TRUE(a.y.values.bit_equal(b.y.values));
  EXPECT_TRUE(a.z.values.bit_equal(b.z.values));
}

TEST(EncodeMv, ZeroFlowZeroBiasGivesZeroLatents) {
  const Codec codec = init_codec({}, 3);  // biases start at zero
  const LatentPair l = encode_mv(FlowField::zeros(32, 32), codec);
  EXPECT_TRUE((l.y.values.values() == 0.0).all());
  EXPECT_TRUE((l.z.values.values() == 0.0).all());
}

TEST(EncodeMv, IndivisibleExtentsRejected) {
  const Codec codec = init_codec(small_config(), 1);
  EXPECT_THROW(encode_mv(FlowField::zeros(48, 32), codec), std::invalid_argument);
}

TEST(Quantize, RoundingConvention) {
  Latent l{Tensor({4}, 0.0)};
  l.values.values() << 1.4, -1.5, 2.5, 3.0;
  const Latent r = quantize(l, QuantMode::round);
  EXPECT_EQ(r.state, QuantState::rounded);
  EXPECT_EQ(r.values[0], 1.0);
  EXPECT_EQ(r.values[1], -2.0);
  EXPECT_EQ(r.values[2], 3.0);
  EXPECT_EQ(r.values[3], 3.0);
}

TEST(Quantize, ClampsToAlphabet) {
  Latent l{Tensor({2}, 0.0)};
  l.values.values() << 100.2, -80.0;
  const Latent r = quantize(l, QuantMode::round);
  EXPECT_EQ(r.values[0], kSymbolMax);
  EXPECT_EQ(r.values[1], kSymbolMin);
}

TEST(Quantize, NoiseSupportAndFreshDraws) {
  grad::Rng rng(5);
  const Latent l{grad::normal_tensor({3, 8, 8}, 4.0, rng)};
  const Latent a = quantize(l, QuantMode::noise, 1);
  const Latent b = quantize(l, QuantMode::noise, 2);
  EXPECT_EQ(a.state, QuantState::noised);
  EXPECT_LE((a.values.values() - l.values.values()).abs().maxCoeff(), 0.5);
  EXPECT_FALSE(a.values.bit_equal(b.values));
  EXPECT_TRUE(quantize(l, QuantMode::noise, 1).values.bit_equal(a.values));
}

TEST(Quantize, IntegerInputIsFixedPointAndDoubleQuantizationRejected) {
  Latent l{Tensor({5}, 0.0)};
  l.values.values() << -3, 0, 7, 63, -64;
  const Latent r = quantize(l, QuantMode::round);
  EXPECT_TRUE(r.values.bit_equal(l.values));
  EXPECT_THROW(quantize(r, QuantMode::round), std::logic_error);
  EXPECT_THROW(quantize(quantize(l, QuantMode::noise, 3), QuantMode::noise, 4), std::logic_error);
}

TEST(BitsEstimate, MassHalfIsOneBitAndAdditive) {
  // Single logistic at 0 with sigmoid(0.5 / s) = 3/4 puts mass 1/2 on [-0.5, 0.5].
  Tensor params({1, 3}, 0.0);
  params.values()[2] = mass_to_log_scale(std::log(3.0));
  const Latent one{Tensor({1, 1, 1}, 0.0), QuantState::rounded};
  EXPECT_NEAR(bits_estimate(one, params).bits, 1.0, 1e-12);

  // sigmoid(0.5 / s) = 5/8 gives mass 1/4.
  params.values()[2] = mass_to_log_scale(std::log(5.0 / 3.0));
  const Latent four{Tensor({1, 2, 2}, 0.0), QuantState::rounded};
  EXPECT_NEAR(bits_estimate(four, params).bits, 8.0, 1e-12);
  EXPECT_THROW(bits_estimate(Latent{Tensor({1, 1, 1}, 0.0)}, params), std::logic_error);
}

TEST(BitsEstimate, StandardGaussianAtZeroMatchesErfOracle) {
  // scale = 0.11 + softplus(p) = 1
  const double p = std::log(std::exp(0.89) - 1.0);
  const Latent x{Tensor({1, 1, 1}, 0.0), QuantState::rounded};
  const double expected = -std::log2(std::erf(0.5 / std::sqrt(2.0)));
  EXPECT_NEAR(bits_estimate(x, Tensor({1, 1, 1}, 0.0), Tensor({1, 1, 1}, p)).bits, expected, 1e-12);
  EXPECT_NEAR(expected, 1.3849, 1e-4);
}

TEST(BitsEstimate, PositiveAndDecreasingTowardMean) {
  grad::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const double mean = rng.uniform(-5, 5), sp = rng.uniform(-2, 2);
    double previous = std::numeric_limits<double>::infinity();
    const double start = std::round(mean) + 12.0;
    for (double v = start; v >= std::round(mean) + 1.0; v -= 1.0) {
      const Latent x{Tensor({1, 1, 1}, v), QuantState::rounded};
      const double b = bits_estimate(x, Tensor({1, 1, 1}, mean), Tensor({1, 1, 1}, sp)).bits;
      EXPECT_GT(b, 0.0);
      EXPECT_LE(b, previous);
      previous = b;
    }
  }
}

TEST(BitsEstimate, FloorCountedInDiagnostics) {
  const Latent x{Tensor({1, 1, 3}, 0.0), QuantState::rounded};
  Tensor mean({1, 1, 3}, 0.0);
  mean.values()[1] = 40.0;
  const BitEstimate e = bits_estimate(x, mean, Tensor({1, 1, 3}, -20.0));
  EXPECT_EQ(e.floored, 1);
  EXPECT_GE(e.bits, 16.0);
}

TEST(Context, ShapeAndZeroFlowBypassesWarp) {
  const Codec codec = init_codec({}, 4);
  const Frame ref = smooth_frame(64, 64, 0, 0);
  const Tensor ctx = extract_context(ref, FlowField::zeros(64, 64), codec);
  EXPECT_EQ(ctx.extents(), (grad::Extents{32, 64, 64}));

  grad::Tape tape(grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, false);
  const grad::Var features =
      grad::leaky_relu(grad::conv2d(tape.constant(ref.samples), p["codec.ctx.feat.w"], p["codec.ctx.feat.b"], 1, 1));
  const grad::Var refined = grad::conv2d(features, p["codec.ctx.refine.w"], p["codec.ctx.refine.b"], 1, 1);
  EXPECT_TRUE(ctx.bit_equal(refined.value()));
  EXPECT_TRUE(extract_context(ref, FlowField::zeros(64, 64), codec).bit_equal(ctx));
  EXPECT_THROW(extract_context(ref, FlowField::zeros(32, 64), codec), std::invalid_argument);
}

TEST(CodeFrame, ShapeAndModesDifferOnlyInQuantizer) {
  const Codec codec = init_codec({}, 5);
  const Frame ref = smooth_frame(64, 64, 0, 0), cur = smooth_frame(64, 64, 1, 0);
  const FlowField flow = FlowField::constant(64, 64, 1.0, 0.0);
  const Tensor ctx = extract_context(ref, flow, codec);
  const FrameCoding r = code_frame(cur, ref, flow, ctx, codec, QuantMode::round, 9);
  const FrameCoding n = code_frame(cur, ref, flow, ctx, codec, QuantMode::noise, 9);
  EXPECT_EQ(r.g_hat.values.extents(), (grad::Extents{48, 8, 8}));
  EXPECT_EQ(r.g_hat.state, QuantState::rounded);
  EXPECT_EQ(n.g_hat.state, QuantState::noised);
  // Removing the known noise from the noised latent and rounding recovers the rounded one.
  Tensor raw = n.g_hat.values;
  raw.values() -= grad::uniform_noise(raw.extents(), noise_stream(9, LatentKind::g)).values();
  EXPECT_LT((raw.values() - r.g_hat.values.values()).abs().maxCoeff(), 0.5 + 1e-12);
  EXPECT_TRUE(round_to_alphabet(raw).bit_equal(r.g_hat.values));
  EXPECT_TRUE(code_frame(cur, ref, flow, ctx, codec, QuantMode::noise, 9).reconstruction.samples.bit_equal(
      n.reconstruction.samples));
}

TEST(DecodePass, TotalIsAdditiveAndDeterministic) {
  const Codec codec = init_codec(small_config(), 6);
  const Frame ref = smooth_frame(32, 32, 0, 0), cur = smooth_frame(32, 32, 0.5, 0.25);
  const LatentPair l = encode_mv(random_flow(32, 32, 7), codec);
  for (const DecodeOptions& o : {DecodeOptions::inference(), DecodeOptions::optimization(3)}) {
    const PassResult a = decode_pass(l, ref, cur, codec, 512.0, o);
    const RDBreakdown& rd = a.rd;
    EXPECT_EQ(rd.total, RDBreakdown::make(rd.lambda, rd.distortion, rd.bits_y, rd.bits_z, rd.bits_g).total);
    EXPECT_EQ(rd.total, 512.0 * rd.distortion + rd.bits_y + rd.bits_z + rd.bits_g);
    EXPECT_GT(rd.bits_y, 0.0);
    EXPECT_GT(rd.bits_z, 0.0);
    EXPECT_GT(rd.bits_g, 0.0);
    const PassResult b = decode_pass(l, ref, cur, codec, 512.0, o);
    EXPECT_TRUE(a.reconstruction.samples.bit_equal(b.reconstruction.samples));
    EXPECT_EQ(a.rd.total, b.rd.total);
  }
}

TEST(DecodePass, HandComputedTotal) {
  const RDBreakdown rd = RDBreakdown::make(1024.0, 0.0025, 100.5, 12.25, 300.0);
  EXPECT_NEAR(rd.total, 2.56 + 412.75, 1e-9);
}

TEST(DecodePass, ForcedZeroNoiseMatchesRoundingBitExactly) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Codec codec = init_codec({}, seed);
    const Frame ref = smooth_frame(64, 64, 0, 0, seed), cur = smooth_frame(64, 64, 1.25, -0.5, seed);
    const LatentPair l = integer_latents(codec, 64, 64, seed + 10);
    const PassResult t = decode_pass(l, ref, cur, codec, 1024.0, DecodeOptions::optimization(seed, true));
    const PassResult i = decode_pass(l, ref, cur, codec, 1024.0, DecodeOptions::inference());
    EXPECT_TRUE(t.reconstruction.samples.bit_equal(i.reconstruction.samples));
    EXPECT_EQ(t.rd.bits_y, i.rd.bits_y);
    EXPECT_EQ(t.rd.bits_z, i.rd.bits_z);
    EXPECT_EQ(t.rd.bits_g, i.rd.bits_g);
    EXPECT_EQ(t.rd.total, i.rd.total);
  }
}

TEST(DecodePass, RejectsQuantizedLatents) {
  const Codec codec = init_codec(small_config(), 1);
  LatentPair l = encode_mv(FlowField::zeros(32, 32), codec);
  l.y = quantize(l.y, QuantMode::round);
  const Frame f = smooth_frame(32, 32, 0, 0);
  EXPECT_THROW(decode_pass(l, f, f, codec, 256.0, DecodeOptions::inference()), std::logic_error);
}

TEST(DecodePass, DecoderSideReproducesInferencePass) {
  const Codec codec = init_codec(small_config(), 12);
  const Frame ref = smooth_frame(32, 32, 0, 0), cur = smooth_frame(32, 32, -1, 0.5);
  const LatentPair l = encode_mv(random_flow(32, 32, 4), codec);
  const PassResult r = decode_pass(l, ref, cur, codec, 1024.0, DecodeOptions::inference());
  DecoderSide side;
  decode_hyper(r.z_hat.values, codec, side);
  decode_motion(r.y_hat.values, ref, codec, side);
  const Frame rec = decode_frame(r.g_hat.values, ref, side, codec);
  EXPECT_TRUE(rec.samples.bit_equal(r.reconstruction.samples));
  EXPECT_TRUE(side.flow.components.bit_equal(r.flow.components));
  EXPECT_EQ(gaussian_bits_estimate(r.y_hat.values, side.y_mean, side.y_scale_param).bits, r.rd.bits_y);
  EXPECT_EQ(gaussian_bits_estimate(r.g_hat.values, side.g_mean, side.g_scale_param).bits, r.rd.bits_g);
}

TEST(DecodePass, NoiseModeGradientMatchesFiniteDifferences) {
  const Codec codec = init_codec(small_config(), 21);
  const Frame ref = smooth_frame(32, 32, 0, 0), cur = smooth_frame(32, 32, 0.75, -0.5);
  const LatentPair l = encode_mv(random_flow(32, 32, 22, 2.0), codec);
  auto build = [&](grad::Tape& tape, std::span<const grad::Var> v) {
    const grad::BoundParams p(tape, codec.params, false);
    return decode_pass(v[0], v[1], tape.constant(ref.samples), tape.constant(cur.samples), p, codec.config, 1024.0,
                       DecodeOptions::optimization(5))
        .total;
  };
  grad::GradCheckOptions opt;
  opt.max_coordinates = 40;
  opt.seed = 3;
  const auto report = grad::check_gradients(build, {l.y.values, l.z.values}, opt);
  EXPECT_TRUE(report.passed()) << report.summary();
}

namespace {

std::vector<TrainSample> translating_pairs(int n, int size, std::uint64_t seed) {
  grad::Rng rng(seed);
  std::vector<TrainSample> out;
  for (int i = 0; i < n; ++i) {
    const double ox = rng.uniform(0, 30), oy = rng.uniform(0, 30), ph = rng.uniform(0, 6);
    out.push_back({smooth_frame(size, size, ox + rng.uniform(-2, 2), oy + rng.uniform(-2, 2), ph),
                   smooth_frame(size, size, ox, oy, ph)});
  }
  return out;
}

motion::FlowNet small_flow() {
  motion::FlowNetConfig c;
  c.hidden_channels = 4;
  return motion::init_flownet(c, 1);
}

}  // namespace

TEST(Train, ZeroLearningRateLeavesParamsUnchanged) {
  const Codec codec = init_codec(small_config(), 2);
  const auto data = translating_pairs(2, 32, 1);
  TrainConfig cfg;
  cfg.iterations = 2;
  cfg.batch_size = 2;
  cfg.learning_rate = {0.0, {}};
  EXPECT_EQ(grad::digest(train_end_to_end(codec, small_flow(), data, cfg).params), grad::digest(codec.params));
}

TEST(Train, FixedBatchLossDecreases) {
  const Codec codec = init_codec(small_config(), 3);
  const motion::FlowNet flow = small_flow();
  const auto data = translating_pairs(4, 32, 2);
  TrainConfig cfg;
  cfg.lambda = 1024.0;
  cfg.iterations = 200;
  cfg.batch_size = 2;
  cfg.learning_rate = {1e-3, {}};
  std::vector<TrainLogEntry> log;
  const Codec trained = train_end_to_end(codec, flow, data, cfg, [&](const TrainLogEntry& e) { log.push_back(e); });
  ASSERT_EQ(log.size(), 200u);
  EXPECT_LT(batch_loss(trained, flow, data, cfg.lambda, 77), batch_loss(codec, flow, data, cfg.lambda, 77));
  EXPECT_EQ(grad::digest(train_end_to_end(codec, flow, data, {cfg.lambda, 3, cfg.learning_rate, 2, 0}).params),
            grad::digest(train_end_to_end(codec, flow, data, {cfg.lambda, 3, cfg.learning_rate, 2, 0}).params));
}

TEST(Model, CheckpointRoundTripAndValidation) {
  Model m{small_flow(), init_codec(small_config(), 4), 512.0};
  const Model back = from_checkpoint(to_checkpoint(m));
  EXPECT_EQ(back.lambda, 512.0);
  EXPECT_EQ(back.codec.config.g_channels, 8);
  EXPECT_EQ(grad::digest(back.codec.params), grad::digest(m.codec.params));
  EXPECT_EQ(grad::digest(back.flow.params), grad::digest(m.flow.params));

  grad::ParamSet broken = to_checkpoint(m);
  broken.erase("codec.mv_dec.1.w");
  EXPECT_THROW(from_checkpoint(broken), std::invalid_argument);
  broken = to_checkpoint(m);
  broken.erase("meta.lambda");
  EXPECT_THROW(from_checkpoint(broken), std::runtime_error);
}
