// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/online/sequence.hpp"

#include "flowcodec/bitstream/latent_coding.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/formats.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace flowcodec::online {

using bitstream::FrameType;
using motion::Frame;

OptMode parse_mode(const std::string& name) {
  if (name == "none") return OptMode::none;
  if (name == "single") return OptMode::single;
  if (name == "window") return OptMode::window;
  throw std::invalid_argument("unknown optimization mode '" + name + "' (none, single, window)");
}

std::string to_string(OptMode mode) {
  switch (mode) {
    case OptMode::none: return "none";
    case OptMode::single: return "single";
    case OptMode::window: return "window";
  }
  return "?";
}

void GopConfig::validate() const {
  if (intra_period < 1) throw std::invalid_argument("GOP: intra period must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("GOP: lambda must be > 0");
}

bool is_intra(int frame_index, int intra_period) { return frame_index % intra_period == 0; }

std::string format_frame_record(const FrameRecord& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "frame=%d type=%c bits_y=%.3f bits_z=%.3f bits_g=%.3f bits=%.0f mse=%.8g psnr=%.4f iters=%ld "
                "best_iter=%ld window=%d",
                r.index, static_cast<char>(r.type), r.rd.bits_y, r.rd.bits_z, r.rd.bits_g, r.coded_bits, r.mse,
                r.psnr, r.iterations, r.best_iteration, r.window);
  return buf;
}

std::uint64_t model_digest(const codec::Model& model) { return grad::digest(codec::to_checkpoint(model)); }

namespace {

void require_video(const motion::Video& video, const codec::Model& model) {
  if (video.frames.empty()) throw std::invalid_argument("encode: empty video");
  if (video.channels != model.codec.config.frame_channels)
    throw std::invalid_argument("encode: video has " + std::to_string(video.channels) +
                                " channels, the checkpoint codes " +
                                std::to_string(model.codec.config.frame_channels));
  codec::require_codable(video.height, video.width, model.flow.config);
}

}  // namespace

EncodeResult encode_sequence(const motion::Video& video, const codec::Model& model, const GopConfig& gop,
                             OptMode mode, const OptConfig& cfg, const WindowConfig& wcfg,
                             const FrameCallback& on_frame) {
  gop.validate();
  cfg.validate();
  if (mode == OptMode::window) wcfg.validate();
  if (gop.lambda != model.lambda)
    throw std::invalid_argument("encode: lambda " + std::to_string(gop.lambda) +
                                " does not match the checkpoint's " + std::to_string(model.lambda));
  require_video(video, model);

  EncodeResult out;
  auto& h = out.container.header;
  h.width = video.width;
  h.height = video.height;
  h.channels = video.channels;
  h.intra_period = gop.intra_period;
  h.lambda = gop.lambda;
  h.checkpoint_digest = model_digest(model);

  const int count = static_cast<int>(video.frames.size());
  for (int i = 0; i < count; ++i) {
    const Frame& cur = video.frames[static_cast<std::size_t>(i)];
    FrameRecord rec;
    rec.index = i;
    bitstream::FramePayload payload;
    Frame recon;
    if (is_intra(i, gop.intra_period)) {
      payload.type = FrameType::intra;
      payload.bytes = motion::frame_to_bytes(cur);
      recon = motion::frame_from_bytes(payload.bytes, cur.channels(), cur.height(), cur.width());
    } else {
      const Frame& ref = out.reconstructions.back();
      OptConfig frame_cfg = cfg;
      frame_cfg.seed = grad::mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
      if (mode == OptMode::none) frame_cfg.iterations = 0;
      OptResult opt;
      if (mode == OptMode::window) {
        const int gop_start = i - i % gop.intra_period;
        const int gop_length = std::min(gop.intra_period, count - gop_start);
        const int w = window_schedule(gop_length, i - gop_start, wcfg.size);
        const std::span<const Frame> frames(video.frames.data() + i, static_cast<std::size_t>(w - 1));
        opt = optimize_window(frames, ref, model, gop.lambda, wcfg, frame_cfg);
        rec.window = w;
      } else {
        opt = optimize_single_frame(cur, ref, model, gop.lambda, frame_cfg);
      }
      const bitstream::InterFrame coded =
          bitstream::encode_inter({opt.latents.z.values, opt.latents.y.values, opt.g_hat.values}, ref, model.codec);
      if (!coded.reconstruction.samples.bit_equal(opt.reconstruction.samples))
        throw std::logic_error("encode: coded reconstruction drifted from the optimizer's at frame " +
                               std::to_string(i));
      payload.type = FrameType::inter;
      payload.bytes = coded.payload;
      recon = coded.reconstruction;
      rec.rd = opt.rd;
      rec.iterations = opt.trace.iterations_run;
      rec.best_iteration = opt.trace.best_iteration;
    }
    rec.type = payload.type;
    rec.coded_bits = payload.bits();
    rec.mse = motion::mse(cur, recon);
    rec.psnr = motion::psnr(cur, recon);
    out.container.frames.push_back(std::move(payload));
    out.reconstructions.push_back(std::move(recon));
    out.records.push_back(rec);
    if (on_frame) on_frame(rec);
  }
  return out;
}

DecodeResult decode_sequence(const bitstream::Container& container, const codec::Model& model) {
  bitstream::require_digest(container, model_digest(model));
  const auto& h = container.header;
  if (h.lambda != model.lambda) throw std::runtime_error("decode: lambda in the container differs from the checkpoint");
  if (h.channels != model.codec.config.frame_channels)
    throw std::runtime_error("decode: channel count differs from the checkpoint");
  codec::require_codable(h.height, h.width, model.flow.config);

  DecodeResult out;
  out.video.width = h.width;
  out.video.height = h.height;
  out.video.channels = h.channels;
  for (std::size_t i = 0; i < container.frames.size(); ++i) {
    const auto& f = container.frames[i];
    const bool intra = is_intra(static_cast<int>(i), h.intra_period);
    if (intra != (f.type == FrameType::intra))
      throw std::runtime_error("decode: frame " + std::to_string(i) + " type does not follow the intra period");
    if (intra) {
      out.video.frames.push_back(motion::frame_from_bytes(f.bytes, h.channels, h.height, h.width));
    } else {
      out.video.frames.push_back(bitstream::decode_inter(f.bytes, out.video.frames.back(), model.codec).reconstruction);
    }
    out.coded_bits.push_back(f.bits());
  }
  return out;
}

}  // namespace flowcodec::online
