// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance checks. One line per criterion:
//   criterion=<n> name=<slug> result=<PASS|FAIL> seconds=<t> <details>
// Pass criterion numbers as arguments to run a subset.
#include "flowcodec/bitstream/latent_coding.hpp"
#include "flowcodec/bitstream/range_coder.hpp"
#include "flowcodec/codec/train.hpp"
#include "flowcodec/eval/ablation.hpp"
#include "flowcodec/eval/synthetic.hpp"
#include "flowcodec/grad/gradcheck.hpp"
#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/finetune.hpp"
#include "flowcodec/motion/formats.hpp"
#include "flowcodec/motion/warp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>

using namespace flowcodec;
using grad::Tensor;
using motion::FlowField;
using motion::Frame;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " failed:" << what;
    }
  }
};

// Desk-scale sizes.
constexpr int kSide = 64;
constexpr int kSequenceFrames = 24;
constexpr int kGop = 12;
constexpr double kLambda = 1024.0;

codec::CodecConfig toy_codec_config() {
  codec::CodecConfig c;
  c.y_channels = 8;
  c.z_channels = 4;
  c.g_channels = 8;
  c.context_channels = 8;
  return c;
}

motion::FlowNetConfig toy_flow_config() {
  motion::FlowNetConfig f;
  f.levels = 3;
  f.hidden_channels = 8;
  return f;
}

eval::SyntheticData synthetic(int side, int frames, double max_pel, std::uint64_t seed) {
  eval::SyntheticSpec s;
  s.width = s.height = side;
  s.frames = frames;
  s.motion = eval::random_motion(frames - 1, max_pel, grad::mix_seed(seed, 77));
  return eval::gen_synthetic(s, seed);
}

// Codec trained briefly on synthetic pairs with a fixed random flow network.
const codec::Model& toy_model() {
  static const codec::Model model = [] {
    codec::Model m{motion::init_flownet(toy_flow_config(), 101), codec::init_codec(toy_codec_config(), 102), kLambda};
    std::vector<codec::TrainSample> data;
    for (std::uint64_t v = 0; v < 6; ++v) {
      const eval::SyntheticData d = synthetic(kSide, 5, 1.5, 500 + v);
      for (std::size_t t = 1; t < d.video.frames.size(); ++t) data.push_back({d.video.frames[t], d.video.frames[t - 1]});
    }
    codec::TrainConfig tc;
    tc.lambda = kLambda;
    tc.iterations = 300;
    tc.learning_rate = {1e-3, {{200, 0.3}}};
    tc.batch_size = 4;
    tc.seed = 103;
    m.codec = codec::train_end_to_end(m.codec, m.flow, data, tc);
    return m;
  }();
  return model;
}

const motion::Video& test_sequence() {
  static const motion::Video v = synthetic(kSide, kSequenceFrames, 1.5, 900).video;
  return v;
}

// 1. Finite-difference checks of the differentiable operations.
void gradient_suite(Outcome& o) {
  grad::GradCheckOptions opt;
  opt.tolerance = 1e-4;
  opt.max_coordinates = 48;
  opt.seed = 7;
  grad::Rng rng(11);
  double worst = 0.0;
  std::size_t coords = 0;
  auto run = [&](const char* name, const grad::GraphBuilder& b, const std::vector<Tensor>& leaves,
                 double step = 1e-6) {
    grad::GradCheckOptions o_step = opt;
    o_step.step = step;
    const grad::GradCheckReport r = grad::check_gradients(b, leaves, o_step);
    worst = std::max(worst, r.max_relative_error);
    coords += r.coordinates_checked;
    o.require(r.passed(), std::string(name) + "(" + r.summary() + ")");
  };
  auto uniform = [&](const grad::Extents& e, double lo, double hi) {
    Tensor t = Tensor::zeros(e);
    for (auto& v : t.values()) v = rng.uniform(lo, hi);
    return t;
  };

  // Warp w.r.t. both the image and the flow; the flow avoids integer sample positions.
  run("warp",
      [](grad::Tape&, std::span<const grad::Var> v) { return grad::sum(grad::mul(motion::warp(v[0], v[1]), v[0])); },
      {uniform({1, 64, 64}, 0, 1), uniform({2, 64, 64}, 0.05, 0.95)});
  run("gaussian_bits",
      [](grad::Tape&, std::span<const grad::Var> v) { return grad::sum(grad::gaussian_bits(v[0], v[1], v[2])); },
      {uniform({4, 16, 16}, -5, 5), uniform({4, 16, 16}, -2, 2), uniform({4, 16, 16}, -1.5, 2.5)});
  run("mixture_bits",
      [](grad::Tape&, std::span<const grad::Var> v) { return grad::sum(grad::logistic_mixture_bits(v[0], v[1])); },
      {uniform({4, 8, 8}, -4, 4), uniform({4, 9}, -1, 1)});
  run("me_loss",
      [](grad::Tape& t, std::span<const grad::Var> v) {
        return motion::me_loss(v[0], v[1], v[2], t.constant(FlowField::constant(32, 32, 0.3, -0.2).components));
      },
      {uniform({1, 32, 32}, 0, 1), uniform({1, 32, 32}, 0, 1), uniform({2, 32, 32}, 0.05, 0.95)});

  // Full Dec_T pass at 64x64 with the default codec, w.r.t. the motion latents. The loss is
  // ~1e3 against per-coordinate slopes of ~1e-3, so a 1e-6 step is dominated by roundoff.
  const codec::Codec codec = codec::init_codec({}, 5);
  const eval::SyntheticData d = synthetic(64, 2, 1.5, 6);
  const Frame& ref = d.video.frames[0];
  const Frame& cur = d.video.frames[1];
  grad::Rng frng(12);
  const codec::LatentPair l =
      codec::encode_mv(FlowField(grad::normal_tensor({2, 64, 64}, 2.0, frng)), codec);
  run("dec_t",
      [&](grad::Tape& t, std::span<const grad::Var> v) {
        const grad::BoundParams p(t, codec.params, false);
        return codec::decode_pass(v[0], v[1], t.constant(ref.samples), t.constant(cur.samples), p, codec.config,
                                  kLambda, codec::DecodeOptions::optimization(13))
            .total;
      },
      {l.y.values, l.z.values}, 1e-4);
  o.detail << " max_rel_err=" << worst << " coordinates=" << coords;
}

// 2. Keep-best never returns a worse rounded cost than the starting latents.
void keep_best(Outcome& o) {
  const codec::Model& m = toy_model();
  const motion::Video& v = test_sequence();
  std::size_t checked = 0;
  double worst_gain = -1e300;
  for (long n : {0L, 50L, 200L}) {
    online::OptConfig cfg;
    cfg.iterations = n;
    Frame ref;
    for (int i = 0; i < kSequenceFrames; ++i) {
      const Frame& cur = v.frames[static_cast<std::size_t>(i)];
      if (online::is_intra(i, kGop)) {
        ref = motion::quantize_to_8bit(cur);
        continue;
      }
      cfg.seed = grad::mix_seed(1, static_cast<std::uint64_t>(i));
      const online::OptResult r = online::optimize_single_frame(cur, ref, m, kLambda, cfg);
      o.require(r.rd.total <= r.initial_rd.total, "frame " + std::to_string(i) + " N=" + std::to_string(n));
      worst_gain = std::max(worst_gain, r.rd.total - r.initial_rd.total);
      ++checked;
      ref = r.reconstruction;
    }
  }
  o.require(checked == 66, "expected 22 P-frames x 3 settings");
  o.detail << " pframe_runs=" << checked << " max(final-initial)=" << worst_gain;
}

// 3. More iterations never hurt, and 200 iterations beat none on perturbed latents.
void improvement_trend(Outcome& o) {
  const codec::Model& m = toy_model();
  const motion::Video& v = test_sequence();
  const std::vector<long> steps{0, 50, 200, 800};
  std::vector<double> mean(steps.size(), 0.0);
  const int frames = 4;
  for (int f = 1; f <= frames; ++f) {
    const Frame ref = motion::quantize_to_8bit(v.frames[static_cast<std::size_t>(f - 1)]);
    const Frame& cur = v.frames[static_cast<std::size_t>(f)];
    codec::LatentPair init = codec::encode_mv(motion::estimate_flow(cur, ref, m.flow), m.codec);
    grad::Rng rng(static_cast<std::uint64_t>(300 + f));
    init.y.values.values() += grad::normal_tensor(init.y.values.extents(), 2.0, rng).values();
    init.z.values.values() += grad::normal_tensor(init.z.values.extents(), 2.0, rng).values();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      online::OptConfig cfg;
      cfg.iterations = steps[k];
      cfg.seed = static_cast<std::uint64_t>(f);
      mean[k] += online::optimize_latents(init, cur, ref, m.codec, kLambda, cfg).rd.total / frames;
    }
  }
  for (std::size_t k = 1; k < steps.size(); ++k)
    o.require(mean[k] <= mean[k - 1], "N=" + std::to_string(steps[k]) + " above N=" + std::to_string(steps[k - 1]));
  o.require(mean[2] < mean[0], "no saving at N=200");
  o.detail << " mean_rd=";
  for (std::size_t k = 0; k < steps.size(); ++k) o.detail << (k ? "," : "") << "N" << steps[k] << ":" << mean[k];
  o.detail << " saving_N200=" << 100.0 * (mean[0] - mean[2]) / mean[0] << "%";
}

// 4. W = 2 reduces to single-frame optimization; the window schedule shrinks at GOP end.
void window_equivalence(Outcome& o) {
  const codec::Model& m = toy_model();
  const motion::Video& v = test_sequence();
  online::OptConfig cfg;
  cfg.iterations = 40;
  cfg.seed = 17;
  const Frame ref = motion::quantize_to_8bit(v.frames[0]);
  const online::OptResult s = online::optimize_single_frame(v.frames[1], ref, m, kLambda, cfg);
  const online::OptResult w =
      online::optimize_window(std::span<const Frame>(&v.frames[1], 1), ref, m, kLambda, {}, cfg);
  o.require(s.latents.y.values.bit_equal(w.latents.y.values) && s.latents.z.values.bit_equal(w.latents.z.values),
            "latents");
  o.require(s.reconstruction.samples.bit_equal(w.reconstruction.samples), "reconstruction");
  o.require(s.cost == w.cost && s.trace.best_cost == w.trace.best_cost, "cost trace");

  motion::Video clip{kSide, kSide, 1, {v.frames.begin(), v.frames.begin() + 5}};
  online::OptConfig short_cfg;
  short_cfg.iterations = 5;
  online::WindowConfig two;
  const auto single = online::encode_sequence(clip, m, {4, kLambda}, online::OptMode::single, short_cfg, two);
  const auto window = online::encode_sequence(clip, m, {4, kLambda}, online::OptMode::window, short_cfg, two);
  o.require(single.container == window.container, "bitstreams differ");

  // Expected sizes for P-frames 1..11 of a 12-frame GOP.
  const std::vector<std::vector<int>> expected{
      {3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 2},
      {4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 2},
      {5, 5, 5, 5, 5, 5, 5, 5, 4, 3, 2},
  };
  for (int wsize = 3; wsize <= 5; ++wsize) {
    std::vector<int> got;
    for (int k = 1; k < 12; ++k) got.push_back(online::window_schedule(12, k, wsize));
    o.require(got == expected[static_cast<std::size_t>(wsize - 3)], "schedule W=" + std::to_string(wsize));
  }
  o.detail << " iterations=40 cost=" << s.cost;
}

// 5. Dec_T on integer latents with the noise forced to zero equals Dec_I.
void mode_equivalence(Outcome& o) {
  int cases = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const codec::Codec codec = codec::init_codec({}, seed);
    const eval::SyntheticData d = synthetic(64, 2, 2.0, seed + 40);
    const Frame& ref = d.video.frames[0];
    const Frame& cur = d.video.frames[1];
    grad::Rng rng(seed);
    codec::LatentPair l = codec::encode_mv(FlowField(grad::normal_tensor({2, 64, 64}, 3.0, rng)), codec);
    l.y.values = codec::round_to_alphabet(l.y.values);
    l.z.values = codec::round_to_alphabet(l.z.values);

    grad::Tape tape;  // recording, as inside the optimizer
    const grad::BoundParams p(tape, codec.params, false);
    const grad::Var y = tape.leaf(l.y.values, true), z = tape.leaf(l.z.values, true);
    const codec::PassGraph t = codec::decode_pass(y, z, tape.constant(ref.samples), tape.constant(cur.samples), p,
                                                  codec.config, kLambda, codec::DecodeOptions::optimization(seed, true));
    const codec::PassResult i = codec::decode_pass(l, ref, cur, codec, kLambda, codec::DecodeOptions::inference());
    o.require(t.reconstruction.value().bit_equal(i.reconstruction.samples), "reconstruction seed " + std::to_string(seed));
    o.require(t.total.value().item() == i.rd.total, "total seed " + std::to_string(seed));
    o.require(t.bits_y.value().item() == i.rd.bits_y && t.bits_z.value().item() == i.rd.bits_z &&
                  t.bits_g.value().item() == i.rd.bits_g,
              "bits seed " + std::to_string(seed));
    ++cases;
  }
  o.detail << " cases=" << cases << " size=64x64";
}

// 6. Entropy coding and container fidelity, and a decoder without optimization.
void bitstream_fidelity(Outcome& o) {
  grad::Rng rng(61);
  std::vector<bitstream::CdfTable> tables;
  std::vector<int> symbols;
  for (int i = 0; i < 100000; ++i) {
    if (i % 3 == 0) {
      const double logits[3]{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      const double locs[3]{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
      const double scales[3]{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      tables.push_back(bitstream::logistic_mixture_cdf(logits, locs, scales, codec::kSymbolMin, codec::kSymbolMax));
    } else {
      tables.push_back(bitstream::gaussian_cdf(rng.uniform(-20, 20), rng.uniform(-4, 4), codec::kSymbolMin,
                                               codec::kSymbolMax));
    }
    symbols.push_back(static_cast<int>(std::floor(rng.uniform(codec::kSymbolMin, codec::kSymbolMax + 1.0))));
  }
  const auto bytes = bitstream::range_encode(symbols, tables);
  o.require(bitstream::range_decode(bytes, tables) == symbols, "range coder round trip");

  const codec::Model& m = toy_model();
  const motion::Video& v = test_sequence();
  online::OptConfig cfg;
  cfg.iterations = 20;
  cfg.seed = 62;
  online::WindowConfig wcfg;
  wcfg.size = 3;
  double worst_slack = -1e300;
  int pframes = 0;
  for (online::OptMode mode : {online::OptMode::none, online::OptMode::single, online::OptMode::window}) {
    const eval::CodingRun run = eval::run_coding(v, m, {kGop, kLambda}, mode, cfg, wcfg);
    const std::string tag = online::to_string(mode);
    o.require(run.decoded_exactly, tag + " decode mismatch");
    o.require(run.decoder_optimizer_iterations == 0, tag + " decoder iterations");
    o.require(run.decoder_recording_tapes == 0, tag + " decoder tapes");
    for (const auto& r : run.encoded.records) {
      if (r.type != bitstream::FrameType::inter) continue;
      const double est = r.rd.bits();
      worst_slack = std::max(worst_slack, std::abs(r.coded_bits - est) - (0.01 * est + 64.0));
      o.require(std::abs(r.coded_bits - est) <= 0.01 * est + 64.0, tag + " frame " + std::to_string(r.index) + " rate");
      ++pframes;
    }
  }
  o.detail << " symbols=100000 bytes=" << bytes.size() << " pframes=" << pframes
           << " max(|actual-est|-(1%+64))=" << worst_slack;
}

// 7. Supervised fine-tuning of the flow network improves held-out EPE and warp PSNR.
void flow_finetune(Outcome& o) {
  auto corpus = [](std::uint64_t base, int videos) {
    std::vector<motion::FlowSample> out;
    for (int i = 0; i < videos; ++i) {
      const auto s = eval::flow_samples(synthetic(kSide, 5, 2.0, base + static_cast<std::uint64_t>(i)));
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  };
  const auto train = corpus(7000, 16), held_out = corpus(8000, 4);
  motion::FlowNet net = motion::init_flownet(toy_flow_config(), 71);
  const motion::FlowQuality before = motion::assess_flow(net, held_out);
  motion::FinetuneConfig fc;
  fc.iterations = 1500;
  fc.learning_rate = {1e-3, {{1000, 0.3}}};
  fc.batch_size = 4;
  fc.seed = 72;
  net = motion::finetune_flow(net, train, fc);
  const motion::FlowQuality after = motion::assess_flow(net, held_out);
  auto db = [](double mse) { return -10.0 * std::log10(mse); };
  o.require(after.epe < before.epe, "held-out EPE did not drop");
  o.require(db(after.warp_mse) > db(before.warp_mse), "held-out warp PSNR did not rise");
  o.detail << " iterations=" << fc.iterations << " epe=" << before.epe << "->" << after.epe
           << " warp_psnr=" << db(before.warp_mse) << "->" << db(after.warp_mse);
}

// Cubic through four points in Lagrange form, integrated with a dense trapezoid rule.
double oracle_bd(const eval::RDCurve& a, const eval::RDCurve& t) {
  auto lagrange = [](const eval::RDCurve& c, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      double li = 1.0;
      for (std::size_t j = 0; j < 4; ++j)
        if (j != i) li *= (p - c[j].psnr) / (c[i].psnr - c[j].psnr);
      s += li * std::log10(c[i].rate);
    }
    return s;
  };
  auto lo_hi = [](const eval::RDCurve& c) {
    auto [lo, hi] = std::minmax_element(c.begin(), c.end(), [](auto& x, auto& y) { return x.psnr < y.psnr; });
    return std::pair{lo->psnr, hi->psnr};
  };
  const double lo = std::max(lo_hi(a).first, lo_hi(t).first), hi = std::min(lo_hi(a).second, lo_hi(t).second);
  const int n = 400000;
  const double h = (hi - lo) / n;
  double area = 0.0;
  for (int i = 0; i <= n; ++i) area += ((i == 0 || i == n) ? 0.5 : 1.0) * (lagrange(t, lo + i * h) - lagrange(a, lo + i * h));
  return (std::pow(10.0, area * h / (hi - lo)) - 1.0) * 100.0;
}

// 8. Metric and loss oracles.
void metric_oracles(Outcome& o) {
  grad::Rng rng(81);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    eval::RDCurve a, t;
    double ra = 0.03, rt = 0.03 * rng.uniform(0.6, 1.4), pa = 28.0 + rng.uniform(0, 2), pt = 28.0 + rng.uniform(0, 2);
    for (int k = 0; k < 4; ++k) {
      ra *= rng.uniform(1.5, 2.2);
      rt *= rng.uniform(1.5, 2.2);
      pa += rng.uniform(1.5, 3.0);
      pt += rng.uniform(1.5, 3.0);
      a.push_back({ra, pa});
      t.push_back({rt, pt});
    }
    worst = std::max(worst, std::abs(eval::bd_rate(a, t) - oracle_bd(a, t)));
  }
  o.require(worst < 0.01, "bd_rate vs oracle");
  const eval::RDCurve a{{0.05, 30.1}, {0.09, 32.4}, {0.16, 34.2}, {0.30, 36.9}};
  eval::RDCurve half = a;
  for (auto& p : half) p.rate *= 0.5;
  const double halved = eval::bd_rate(a, half);
  o.require(std::abs(halved + 50.0) <= 1e-9, "halved rates");

  // Motion loss on a 2x2 frame: warp by (1, 0) copies the right column; one label off by (3, -4).
  auto plane = [](double a, double b, double c, double d) {
    Tensor t = Tensor::zeros({1, 2, 2});
    t.at(0, 0, 0) = a;
    t.at(0, 0, 1) = b;
    t.at(0, 1, 0) = c;
    t.at(0, 1, 1) = d;
    return Frame(t);
  };
  const Frame ref = plane(0.1, 0.2, 0.3, 0.4);
  const Frame cur = plane(0.25, 0.2, 0.4, 0.5);
  FlowField label = FlowField::constant(2, 2, 1.0, 0.0);
  label.components.at(0, 0, 0) = -2.0;
  label.components.at(1, 0, 0) = 4.0;
  const double me = motion::me_loss(cur, ref, FlowField::constant(2, 2, 1.0, 0.0), label, 100.0);
  const double me_hand = 5.0 / 4 + 100.0 * (0.05 * 0.05 + 0.1 * 0.1) / 4;  // 1.5625
  o.require(std::abs(me - me_hand) <= 1e-9, "motion loss");

  const codec::RDBreakdown rd = codec::RDBreakdown::make(1024.0, 0.0025, 100.5, 20.25, 300.0);
  o.require(std::abs(rd.total - 423.31) <= 1e-9, "single-frame total");
  const std::vector<double> per{10.0, 4.0, 2.0}, alpha{1.0, 0.5, 0.2};
  o.require(std::abs(online::window_loss(per, alpha) - 12.4) <= 1e-9, "window total");

  // The reported total of a real pass equals lambda * MSE + bits recomputed from its parts.
  const codec::Model& m = toy_model();
  const motion::Video& v = test_sequence();
  const Frame r0 = motion::quantize_to_8bit(v.frames[0]);
  const codec::PassResult p = codec::decode_pass(codec::encode_mv(motion::estimate_flow(v.frames[1], r0, m.flow), m.codec),
                                                 r0, v.frames[1], m.codec, kLambda, codec::DecodeOptions::inference());
  const double recomputed = kLambda * motion::mse(v.frames[1], p.reconstruction) + p.rd.bits_y + p.rd.bits_z + p.rd.bits_g;
  o.require(std::abs(p.rd.total - recomputed) <= 1e-9 * std::max(1.0, recomputed), "pass total");
  o.detail << " bd_oracle_max_diff_pp=" << worst << " halved=" << halved << " me_loss=" << me;
}

// 9. Densified labels equal the programmed motion for integer and 1/16-pel translations.
void label_pipeline(Outcome& o) {
  int frames = 0;
  for (int variant = 0; variant < 2; ++variant) {
    eval::SyntheticSpec s;
    s.width = 64;
    s.height = 48;
    s.frames = 12;
    if (variant == 0) s.motion = {{1, 0}, {-2, 1}, {0, -3}, {2, 2}};
    else s.motion = eval::random_motion(11, 3.0, 91);
    const eval::SyntheticData d = eval::gen_synthetic(s, 92);
    const auto labels = motion::decode_labels(motion::encode_labels(d.labels));
    for (std::size_t t = 0; t < d.flows.size(); ++t, ++frames) {
      o.require(motion::densify_labels(labels[t]).components.bit_equal(d.flows[t].components),
                "frame " + std::to_string(t) + " variant " + std::to_string(variant));
      if (variant == 1 && t > 0)
        o.require(std::abs(d.flows[t].horizontal(0, 0) * 16 - std::round(d.flows[t].horizontal(0, 0) * 16)) == 0.0,
                  "1/16 grid");
    }
  }
  o.detail << " frames=" << frames;
}

struct Criterion {
  int number;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient-suite", gradient_suite},       {2, "keep-best", keep_best},
      {3, "online-improvement", improvement_trend}, {4, "window-equivalence", window_equivalence},
      {5, "mode-equivalence", mode_equivalence},   {6, "bitstream-fidelity", bitstream_fidelity},
      {7, "flow-finetune", flow_finetune},         {8, "metric-oracles", metric_oracles},
      {9, "label-pipeline", label_pipeline},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception:" << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion=%d name=%s result=%s seconds=%.1f%s\n", c.number, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
