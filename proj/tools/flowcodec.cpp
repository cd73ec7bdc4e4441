// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Reports go to stdout, one record per line as key=value pairs;
// field orders are listed in README.md.
#include "flowcodec/bitstream/container.hpp"
#include "flowcodec/codec/train.hpp"
#include "flowcodec/eval/ablation.hpp"
#include "flowcodec/eval/synthetic.hpp"
#include "flowcodec/eval/visualize.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/grad/tape.hpp"
#include "flowcodec/motion/formats.hpp"
#include "flowcodec/online/sequence.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace flowcodec;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::optional<double> lambda;
  int gop = 12;
  std::string mode = "single";
  std::optional<long> iters;
  int window = 2;
  std::string out;
};

void need(const std::string& value, const char* flag) {
  if (value.empty()) throw std::invalid_argument(std::string("missing ") + flag);
}

double psnr_from_mse(double mse) { return mse < motion::kPsnrMseFloor ? motion::kPsnrCap : -10.0 * std::log10(mse); }

codec::Model load_checked(const Globals& g) {
  need(g.checkpoint, "--checkpoint");
  return codec::load_model(g.checkpoint);
}

online::OptConfig opt_config(const Globals& g) {
  online::OptConfig c;
  if (g.iters) c.iterations = *g.iters;
  c.seed = g.seed;
  return c;
}

online::WindowConfig window_config(const Globals& g) {
  online::WindowConfig w;
  w.size = g.window;
  return w;
}

online::GopConfig gop_config(const Globals& g, const codec::Model& m) {
  return {g.gop, g.lambda.value_or(m.lambda)};
}

void print_summary(const char* tag, const eval::RDPoint& p, std::size_t frames, double seconds) {
  std::printf("%s frames=%zu bpp=%.6f psnr=%.4f seconds=%.3f\n", tag, frames, p.rate, p.psnr, seconds);
}

// Each line: "<rate_bpp> <psnr_db>"; blank lines and '#' comments are skipped.
eval::RDCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open RD curve " + path);
  eval::RDCurve c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    eval::RDPoint p;
    if (!(ss >> p.rate >> p.psnr)) throw std::runtime_error("bad RD line in " + path + ": " + line);
    c.push_back(p);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowcodec: learned P-frame codec with encoder-side latent optimization"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--checkpoint", g.checkpoint, "model checkpoint");
  app.add_option("--lambda", g.lambda, "rate-distortion multiplier (defaults to the checkpoint's)");
  app.add_option("--gop", g.gop, "intra period")->check(CLI::PositiveNumber);
  app.add_option("--mode", g.mode, "latent optimization mode")->check(CLI::IsMember({"none", "single", "window"}));
  app.add_option("--iters", g.iters, "iterations (optimizer or training, per subcommand)");
  app.add_option("--window", g.window, "window size W for --mode window")->check(CLI::Range(2, 5));
  app.add_option("--out", g.out, "output path");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "render a translated texture video with MV labels");
  eval::SyntheticSpec spec;
  double max_motion = 2.0;
  gen->add_option("--width", spec.width);
  gen->add_option("--height", spec.height);
  gen->add_option("--frames", spec.frames);
  gen->add_option("--max-motion", max_motion, "largest per-frame displacement, pixels");
  gen->add_option("--smoothing", spec.smoothing);

  // train-flow
  auto* tflow = app.add_subcommand("train-flow", "fine-tune the flow network on MV labels");
  std::vector<std::string> flow_videos, flow_labels;
  double flow_lr = 1e-3;
  int flow_batch = 4;
  tflow->add_option("--video", flow_videos, "FVID files")->required();
  tflow->add_option("--labels", flow_labels, "label files, one per video")->required();
  tflow->add_option("--lr", flow_lr);
  tflow->add_option("--batch", flow_batch);

  // train-codec
  auto* tcodec = app.add_subcommand("train-codec", "train the codec end to end for one lambda");
  std::vector<std::string> codec_videos;
  double codec_lr = 1e-4;
  int codec_batch = 4;
  tcodec->add_option("--video", codec_videos, "FVID files")->required();
  tcodec->add_option("--lr", codec_lr);
  tcodec->add_option("--batch", codec_batch);

  // encode / decode / eval
  std::string input;
  auto* enc = app.add_subcommand("encode", "code a video into an FRDC bitstream");
  enc->add_option("--input", input, "FVID file")->required();
  auto* dec = app.add_subcommand("decode", "decode an FRDC bitstream into an FVID video");
  dec->add_option("--input", input, "FRDC file")->required();
  auto* ev = app.add_subcommand("eval", "encode, decode, verify and report one RD point");
  ev->add_option("--input", input, "FVID file")->required();

  // bdrate
  auto* bd = app.add_subcommand("bdrate", "BD-rate between two RD curve files");
  std::string anchor_path, test_path;
  bd->add_option("--anchor", anchor_path)->required();
  bd->add_option("--test", test_path)->required();

  // ablate
  auto* abl = app.add_subcommand("ablate", "sweep iterations or window size");
  std::string axis = "iters";
  std::vector<int> sweep;
  std::vector<std::string> abl_ckpts, abl_videos;
  abl->add_option("--axis", axis)->check(CLI::IsMember({"iters", "window"}));
  abl->add_option("--values", sweep, "sweep values; the first is the anchor");
  abl->add_option("--checkpoints", abl_ckpts, "one checkpoint per lambda")->required();
  abl->add_option("--video", abl_videos, "FVID files")->required();

  // dump-flow
  auto* dump = app.add_subcommand("dump-flow", "write a colour-coded flow image");
  int frame_index = 1;
  std::string labels_path;
  dump->add_option("--input", input, "FVID file (flow estimated with --checkpoint)");
  dump->add_option("--labels", labels_path, "label file (densified instead of estimating)");
  dump->add_option("--frame", frame_index, "flow of this frame against the previous one");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      need(g.out, "--out");
      spec.motion = eval::random_motion(std::max(spec.frames - 1, 0), max_motion, grad::mix_seed(g.seed, 1));
      const eval::SyntheticData d = eval::gen_synthetic(spec, g.seed);
      motion::write_video(g.out + ".fvid", d.video);
      motion::write_labels(g.out + ".mvl", d.labels);
      std::printf("synthetic video=%s.fvid labels=%s.mvl width=%d height=%d frames=%d seed=%llu\n", g.out.c_str(),
                  g.out.c_str(), spec.width, spec.height, spec.frames, static_cast<unsigned long long>(g.seed));
    } else if (*tflow) {
      need(g.out, "--out");
      if (flow_videos.size() != flow_labels.size()) throw std::invalid_argument("one label file per video");
      std::vector<motion::FlowSample> data;
      for (std::size_t i = 0; i < flow_videos.size(); ++i) {
        const motion::Video v = motion::read_video(flow_videos[i]);
        const auto labels = motion::read_labels(flow_labels[i]);
        if (labels.size() != v.frames.size()) throw std::invalid_argument("label count differs from frame count");
        for (std::size_t t = 1; t < v.frames.size(); ++t) data.push_back({v.frames[t], v.frames[t - 1], labels[t]});
      }
      codec::Model m;
      if (!g.checkpoint.empty()) {
        m = codec::load_model(g.checkpoint);
      } else {
        motion::FlowNetConfig fc;
        fc.frame_channels = data.empty() ? 1 : data[0].current.channels();
        codec::CodecConfig cc;
        cc.frame_channels = fc.frame_channels;
        m = {motion::init_flownet(fc, g.seed), codec::init_codec(cc, grad::mix_seed(g.seed, 2)), g.lambda.value_or(1024.0)};
      }
      motion::FinetuneConfig fc;
      fc.iterations = g.iters.value_or(2000);
      fc.learning_rate = {flow_lr, {}};
      fc.batch_size = flow_batch;
      fc.seed = g.seed;
      const motion::FlowQuality before = motion::assess_flow(m.flow, data);
      m.flow = motion::finetune_flow(m.flow, data, fc, [](const motion::FinetuneLogEntry& e) {
        std::printf("flow-epoch epoch=%ld iteration=%ld loss=%.8g\n", e.epoch, e.iteration, e.mean_loss);
      });
      const motion::FlowQuality after = motion::assess_flow(m.flow, data);
      codec::save_model(g.out, m);
      std::printf("flow-quality epe_before=%.6f epe_after=%.6f warp_psnr_before=%.4f warp_psnr_after=%.4f\n",
                  before.epe, after.epe, psnr_from_mse(before.warp_mse), psnr_from_mse(after.warp_mse));
    } else if (*tcodec) {
      need(g.out, "--out");
      codec::Model m = load_checked(g);
      std::vector<codec::TrainSample> data;
      for (const auto& path : codec_videos) {
        const motion::Video v = motion::read_video(path);
        for (std::size_t t = 1; t < v.frames.size(); ++t) data.push_back({v.frames[t], v.frames[t - 1]});
      }
      codec::TrainConfig tc;
      tc.lambda = g.lambda.value_or(m.lambda);
      tc.iterations = g.iters.value_or(1000);
      tc.learning_rate = {codec_lr, {}};
      tc.batch_size = codec_batch;
      tc.seed = g.seed;
      m.codec = codec::train_end_to_end(m.codec, m.flow, data, tc, [](const codec::TrainLogEntry& e) {
        std::printf("codec-train iteration=%ld loss=%.8g mse=%.8g bits_y=%.3f bits_z=%.3f bits_g=%.3f\n", e.iteration,
                    e.loss, e.mean_rd.distortion, e.mean_rd.bits_y, e.mean_rd.bits_z, e.mean_rd.bits_g);
      });
      m.lambda = tc.lambda;
      codec::save_model(g.out, m);
    } else if (*enc) {
      need(g.out, "--out");
      const codec::Model m = load_checked(g);
      const motion::Video v = motion::read_video(input);
      const auto t0 = std::chrono::steady_clock::now();
      const online::EncodeResult r =
          online::encode_sequence(v, m, gop_config(g, m), online::parse_mode(g.mode), opt_config(g),
                                  window_config(g), [](const online::FrameRecord& rec) {
                                    std::printf("%s\n", online::format_frame_record(rec).c_str());
                                    std::fflush(stdout);
                                  });
      bitstream::write_container_file(g.out, r.container);
      print_summary("encode", eval::rd_point(r, v), r.records.size(),
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } else if (*dec) {
      need(g.out, "--out");
      const codec::Model m = load_checked(g);
      const bitstream::Container c = bitstream::read_container_file(input);
      const auto t0 = std::chrono::steady_clock::now();
      const online::DecodeResult r = online::decode_sequence(c, m);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      motion::write_video(g.out, r.video);
      double bits = 0.0;
      for (double b : r.coded_bits) bits += b;
      const auto tapes = grad::Tape::recording_tapes_created();
      std::printf("decode frames=%zu bits=%.0f recording_tapes=%llu optimizer_iters=%llu seconds=%.3f\n",
                  r.video.frames.size(), bits, static_cast<unsigned long long>(tapes),
                  static_cast<unsigned long long>(online::optimizer_iterations_total()), secs);
      if (tapes != 0) throw std::logic_error("decode built a gradient tape");
    } else if (*ev) {
      const codec::Model m = load_checked(g);
      const motion::Video v = motion::read_video(input);
      const eval::CodingRun r = eval::run_coding(v, m, gop_config(g, m), online::parse_mode(g.mode), opt_config(g),
                                                 window_config(g));
      for (const auto& rec : r.encoded.records) std::printf("%s\n", online::format_frame_record(rec).c_str());
      std::printf("eval frames=%zu bpp=%.6f psnr=%.4f enc_s=%.3f dec_s=%.3f dec_iters=%llu dec_tapes=%llu exact=%d\n",
                  r.encoded.records.size(), r.point.rate, r.point.psnr, r.encode_seconds, r.decode_seconds,
                  static_cast<unsigned long long>(r.decoder_optimizer_iterations),
                  static_cast<unsigned long long>(r.decoder_recording_tapes), r.decoded_exactly ? 1 : 0);
      if (!g.out.empty()) bitstream::write_container_file(g.out, r.encoded.container);
      if (!r.decoded_exactly) throw std::logic_error("decoder output differs from the encoder reconstruction");
    } else if (*bd) {
      std::printf("bdrate value=%.6f\n", eval::bd_rate(read_curve(anchor_path), read_curve(test_path)));
    } else if (*abl) {
      eval::AblationConfig ac;
      ac.axis = eval::parse_axis(axis);
      ac.values = sweep;
      ac.checkpoints = abl_ckpts;
      ac.intra_period = g.gop;
      ac.opt = opt_config(g);
      ac.window = window_config(g);
      for (const auto& p : abl_videos)
        ac.datasets.emplace_back(std::filesystem::path(p).stem().string(), motion::read_video(p));
      const eval::AblationReport r = eval::run_ablation(ac, [&](const eval::AblationCell& c) {
        std::printf("%s\n", eval::format_cell(c, ac.axis).c_str());
        std::fflush(stdout);
      });
      const std::vector<int> values = sweep.empty() ? eval::default_sweep(ac.axis) : sweep;
      std::ostringstream rows;
      for (const auto& row : r.rows) rows << eval::format_row(row, ac.axis, values.front()) << '\n';
      std::printf("%s", rows.str().c_str());
      if (!g.out.empty()) {
        std::ofstream f(g.out);
        for (const auto& c : r.cells) f << eval::format_cell(c, ac.axis) << '\n';
        f << rows.str();
      }
    } else if (*dump) {
      need(g.out, "--out");
      motion::FlowField flow;
      if (!labels_path.empty()) {
        const auto labels = motion::read_labels(labels_path);
        if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= labels.size())
          throw std::invalid_argument("--frame outside the label file");
        flow = motion::densify_labels(labels[static_cast<std::size_t>(frame_index)]);
      } else {
        need(input, "--input or --labels");
        const codec::Model m = load_checked(g);
        const motion::Video v = motion::read_video(input);
        if (frame_index < 1 || static_cast<std::size_t>(frame_index) >= v.frames.size())
          throw std::invalid_argument("--frame must name a frame with a predecessor");
        const auto i = static_cast<std::size_t>(frame_index);
        flow = motion::estimate_flow(v.frames[i], v.frames[i - 1], m.flow);
      }
      eval::dump_flow_visualization(flow, g.out);
      std::printf("dump-flow path=%s width=%d height=%d p99=%.6f\n", g.out.c_str(), flow.width(), flow.height(),
                  eval::magnitude_p99(flow));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "flowcodec: %s\n", e.what());
    return 1;
  }
  return 0;
}
