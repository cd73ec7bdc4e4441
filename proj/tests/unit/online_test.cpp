// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/bitstream/container.hpp"
#include "flowcodec/grad/tape.hpp"
#include "flowcodec/online/sequence.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace flowcodec;
using namespace flowcodec::online;
using motion::Frame;

namespace {

codec::Model small_model(double lambda = 1024.0) {
  codec::CodecConfig c;
  c.y_channels = 6;
  c.z_channels = 4;
  c.g_channels = 8;
  c.context_channels = 6;
  motion::FlowNetConfig f;
  f.levels = 2;
  f.hidden_channels = 4;
  return {motion::init_flownet(f, 11), codec::init_codec(c, 12), lambda};
}

Frame moving(int t, int size = 32) {
  Frame f = Frame::zeros(1, size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = x + 1.5 * t, v = y + 0.5 * t;
      f.samples.at(0, y, x) = 0.5 + 0.3 * std::sin(0.4 * u + 0.2 * v) + 0.1 * std::cos(0.15 * u - 0.35 * v);
    }
  return f;
}

motion::Video clip(int n) {
  motion::Video v{32, 32, 1, {}};
  for (int t = 0; t < n; ++t) v.frames.push_back(moving(t));
  return v;
}

OptConfig iterations(long n, std::uint64_t seed = 5) {
  OptConfig c;
  c.iterations = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Schedule, StepSizeHalvesAfter1200) {
  const OptConfig c;
  EXPECT_EQ(lr_schedule(0, c), 5e-3);
  EXPECT_EQ(lr_schedule(1199, c), 5e-3);
  EXPECT_EQ(lr_schedule(1250, c), 2.5e-3);
  OptConfig flat;
  flat.learning_rate = {1e-2, {}};
  EXPECT_EQ(lr_schedule(5000, flat), 1e-2);
}

TEST(Schedule, WindowShrinksAtGopEnd) {
  EXPECT_EQ(window_schedule(12, 3, 4), 4);
  EXPECT_EQ(window_schedule(12, 10, 4), 3);
  EXPECT_EQ(window_schedule(12, 11, 4), 2);
  EXPECT_EQ(window_schedule(12, 1, 2), 2);
  EXPECT_THROW(window_schedule(12, 12, 4), std::invalid_argument);
  EXPECT_THROW(window_schedule(12, 3, 1), std::invalid_argument);
}

TEST(Schedule, IntraPeriodCounts) {
  int intra = 0, inter = 0;
  for (int i = 0; i < 96; ++i) (is_intra(i, 12) ? intra : inter)++;
  EXPECT_EQ(intra, 8);
  EXPECT_EQ(inter, 88);
}

TEST(WindowLoss, WeightedSum) {
  const std::vector<double> l{10.0, 4.0}, w{1.0, 0.5};
  EXPECT_EQ(window_loss(l, w), 12.0);
  EXPECT_THROW(window_loss(l, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Config, Validation) {
  EXPECT_THROW(iterations(-1).validate(), std::invalid_argument);
  WindowConfig w;
  w.size = 6;
  EXPECT_THROW(w.validate(), std::invalid_argument);  // four default weights cover W <= 5
  w.size = 1;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  EXPECT_THROW(parse_mode("both"), std::invalid_argument);
  EXPECT_EQ(parse_mode("window"), OptMode::window);
}

TEST(Optimizer, ZeroIterationsKeepsInitialLatents) {
  const codec::Model m = small_model();
  const Frame ref = moving(0), cur = moving(1);
  const OptResult r = optimize_single_frame(cur, ref, m, m.lambda, iterations(0));
  const codec::LatentPair init = codec::encode_mv(motion::estimate_flow(cur, ref, m.flow), m.codec);
  const codec::PassResult dec = codec::decode_pass(init, ref, cur, m.codec, m.lambda, codec::DecodeOptions::inference());
  EXPECT_EQ(r.cost, dec.rd.total);
  EXPECT_EQ(r.initial_cost, dec.rd.total);
  EXPECT_TRUE(r.latents.y.values.bit_equal(dec.y_hat.values));
  EXPECT_TRUE(r.reconstruction.samples.bit_equal(dec.reconstruction.samples));
  EXPECT_EQ(r.trace.best_cost.size(), 1u);
  EXPECT_EQ(r.trace.best_iteration, 0);
}

TEST(Optimizer, KeepBestNeverIncreasesAndMatchesKeptLatents) {
  const codec::Model m = small_model(4096.0);
  const Frame ref = moving(0), cur = moving(1);
  const OptResult r = optimize_single_frame(cur, ref, m, m.lambda, iterations(30));
  ASSERT_EQ(r.trace.best_cost.size(), 31u);
  for (std::size_t i = 1; i < r.trace.best_cost.size(); ++i) EXPECT_LE(r.trace.best_cost[i], r.trace.best_cost[i - 1]);
  EXPECT_LE(r.cost, r.initial_cost);
  EXPECT_EQ(r.cost, r.trace.best_cost.back());
  EXPECT_EQ(r.rd.total, r.cost);
  // Re-decoding the kept integer latents reproduces the reported result exactly.
  const codec::LatentPair kept{{r.latents.y.values}, {r.latents.z.values}};
  const codec::PassResult again = codec::decode_pass(kept, ref, cur, m.codec, m.lambda, codec::DecodeOptions::inference());
  EXPECT_EQ(again.rd.total, r.cost);
  EXPECT_TRUE(again.reconstruction.samples.bit_equal(r.reconstruction.samples));
}

TEST(Optimizer, CodecParametersStayFrozen) {
  const codec::Model m = small_model();
  const std::uint64_t before = model_digest(m);
  optimize_single_frame(moving(1), moving(0), m, m.lambda, iterations(5));
  const std::vector<Frame> frames{moving(1), moving(2)};
  WindowConfig w;
  w.size = 3;
  optimize_window(frames, moving(0), m, m.lambda, w, iterations(3));
  EXPECT_EQ(model_digest(m), before);
}

TEST(Optimizer, WindowOfTwoEqualsSingleFrame) {
  const codec::Model m = small_model(4096.0);
  const Frame ref = moving(0), cur = moving(1);
  const OptResult single = optimize_single_frame(cur, ref, m, m.lambda, iterations(12, 9));
  const std::vector<Frame> frames{cur};
  const OptResult window = optimize_window(frames, ref, m, m.lambda, WindowConfig{}, iterations(12, 9));
  EXPECT_EQ(single.cost, window.cost);
  EXPECT_EQ(single.trace.best_cost, window.trace.best_cost);
  EXPECT_EQ(single.trace.best_iteration, window.trace.best_iteration);
  EXPECT_TRUE(single.latents.y.values.bit_equal(window.latents.y.values));
  EXPECT_TRUE(single.latents.z.values.bit_equal(window.latents.z.values));
  EXPECT_TRUE(single.reconstruction.samples.bit_equal(window.reconstruction.samples));
}

TEST(Optimizer, WindowKeepBestIsMonotone) {
  const codec::Model m = small_model(4096.0);
  const std::vector<Frame> frames{moving(1), moving(2), moving(3)};
  WindowConfig w;
  w.size = 4;
  const OptResult r = optimize_window(frames, moving(0), m, m.lambda, w, iterations(6));
  ASSERT_EQ(r.trace.best_cost.size(), 7u);
  for (std::size_t i = 1; i < r.trace.best_cost.size(); ++i) EXPECT_LE(r.trace.best_cost[i], r.trace.best_cost[i - 1]);
  EXPECT_GT(r.cost, r.rd.total);  // later frames add weighted cost on top of frame 0
}

TEST(Sequence, RoundTripAndDecoderDoesNoOptimization) {
  const codec::Model m = small_model();
  const motion::Video v = clip(6);
  GopConfig gop;
  gop.intra_period = 4;
  gop.lambda = m.lambda;
  for (OptMode mode : {OptMode::none, OptMode::single, OptMode::window}) {
    WindowConfig w;
    w.size = 3;
    std::vector<FrameRecord> seen;
    const EncodeResult enc =
        encode_sequence(v, m, gop, mode, iterations(3), w, [&](const FrameRecord& r) { seen.push_back(r); });
    ASSERT_EQ(enc.records.size(), 6u);
    EXPECT_EQ(seen.size(), 6u);
    EXPECT_EQ(enc.records[0].type, bitstream::FrameType::intra);
    EXPECT_EQ(enc.records[4].type, bitstream::FrameType::intra);
    EXPECT_EQ(enc.records[1].type, bitstream::FrameType::inter);
    EXPECT_EQ(enc.records[1].iterations, mode == OptMode::none ? 0 : 3);
    if (mode == OptMode::window) {
      EXPECT_EQ(enc.records[1].window, 3);
      EXPECT_EQ(enc.records[3].window, 2);  // last frame of the GOP
      EXPECT_EQ(enc.records[5].window, 2);  // last frame of the sequence
    }
    for (std::size_t i = 0; i < enc.records.size(); ++i)
      EXPECT_EQ(enc.records[i].coded_bits, 8.0 * enc.container.frames[i].bytes.size());

    const bitstream::Container parsed = bitstream::read_container(bitstream::write_container(enc.container));
    const std::uint64_t tapes = grad::Tape::recording_tapes_created();
    const std::uint64_t iters = optimizer_iterations_total();
    const DecodeResult dec = decode_sequence(parsed, m);
    EXPECT_EQ(grad::Tape::recording_tapes_created(), tapes);
    EXPECT_EQ(optimizer_iterations_total(), iters);
    ASSERT_EQ(dec.video.frames.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i)
      EXPECT_TRUE(dec.video.frames[i].samples.bit_equal(enc.reconstructions[i].samples)) << to_string(mode) << " " << i;
  }
}

TEST(Sequence, RejectsMismatchedLambdaAndCheckpoint) {
  const codec::Model m = small_model();
  GopConfig gop;
  gop.lambda = 512.0;
  EXPECT_THROW(encode_sequence(clip(2), m, gop, OptMode::none, iterations(0), {}), std::invalid_argument);
  gop.lambda = m.lambda;
  const EncodeResult enc = encode_sequence(clip(2), m, gop, OptMode::none, iterations(0), {});
  codec::Model other = small_model();
  other.codec = codec::init_codec(m.codec.config, 99);
  EXPECT_THROW(decode_sequence(enc.container, other), std::runtime_error);
}

TEST(Sequence, RecordFormatFieldOrder) {
  FrameRecord r;
  r.index = 3;
  r.type = bitstream::FrameType::inter;
  r.rd = codec::RDBreakdown::make(1024, 0.001, 10, 2, 30);
  r.coded_bits = 48;
  r.mse = 0.001;
  r.psnr = 30;
  r.iterations = 7;
  r.best_iteration = 5;
  EXPECT_EQ(format_frame_record(r),
            "frame=3 type=P bits_y=10.000 bits_z=2.000 bits_g=30.000 bits=48 mse=0.001 psnr=30.0000 iters=7 "
            "best_iter=5 window=0");
}
