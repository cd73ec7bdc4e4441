// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/formats.hpp"

#include "flowcodec/bytes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowcodec::motion {

std::vector<std::uint8_t> encode_labels(std::span<const MVLabelGrid> grids) {
  ByteWriter w;
  for (const MVLabelGrid& g : grids) {
    g.validate();
    if (g.stride > std::numeric_limits<std::uint16_t>::max() || g.precision > std::numeric_limits<std::uint16_t>::max())
      throw std::invalid_argument("MV label grid: stride/precision exceed u16");
    w.raw(std::string("MVL1"));
    w.u32(static_cast<std::uint32_t>(g.frame_width));
    w.u32(static_cast<std::uint32_t>(g.frame_height));
    w.u16(static_cast<std::uint16_t>(g.stride));
    w.u16(static_cast<std::uint16_t>(g.precision));
    w.u32(static_cast<std::uint32_t>(g.metadata.size()));
    w.raw(g.metadata);
    for (std::size_t c = 0; c < g.horizontal.size(); ++c) {
      w.i16(g.horizontal[c]);
      w.i16(g.vertical[c]);
    }
  }
  return w.take();
}

std::vector<MVLabelGrid> decode_labels(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "MV label file");
  std::vector<MVLabelGrid> out;
  while (!r.done()) {
    r.expect_magic("MVL1");
    MVLabelGrid g;
    g.frame_width = static_cast<int>(r.u32());
    g.frame_height = static_cast<int>(r.u32());
    g.stride = r.u16();
    g.precision = r.u16();
    if (g.stride < 1 || g.precision < 1 || g.frame_width <= 0 || g.frame_height <= 0)
      throw std::runtime_error("MV label file: invalid header at byte " + std::to_string(r.position()));
    g.metadata = r.str(r.u32());
    const auto cells = static_cast<std::size_t>(g.grid_width()) * g.grid_height();
    g.horizontal.resize(cells);
    g.vertical.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      g.horizontal[c] = r.i16();
      g.vertical[c] = r.i16();
    }
    out.push_back(std::move(g));
  }
  return out;
}

void write_labels(const std::string& path, std::span<const MVLabelGrid> grids) { write_file(path, encode_labels(grids)); }
std::vector<MVLabelGrid> read_labels(const std::string& path) { return decode_labels(read_file(path)); }

std::vector<std::uint8_t> frame_to_bytes(const Frame& frame) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(frame.samples.size()));
  for (Eigen::Index i = 0; i < frame.samples.size(); ++i)
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(std::clamp(frame.samples[i], 0.0, 1.0) * 255.0));
  return out;
}

Frame frame_from_bytes(std::span<const std::uint8_t> bytes, int channels, int height, int width) {
  Frame f = Frame::zeros(channels, height, width);
  if (static_cast<Eigen::Index>(bytes.size()) != f.samples.size())
    throw std::invalid_argument("frame_from_bytes: byte count does not match extents");
  for (Eigen::Index i = 0; i < f.samples.size(); ++i) f.samples[i] = bytes[static_cast<std::size_t>(i)] / 255.0;
  return f;
}

Frame quantize_to_8bit(const Frame& frame) {
  return frame_from_bytes(frame_to_bytes(frame), frame.channels(), frame.height(), frame.width());
}

std::vector<std::uint8_t> encode_video(const Video& video) {
  ByteWriter w;
  w.raw(std::string("FVID"));
  w.u32(static_cast<std::uint32_t>(video.width));
  w.u32(static_cast<std::uint32_t>(video.height));
  w.u16(static_cast<std::uint16_t>(video.channels));
  w.u32(static_cast<std::uint32_t>(video.frames.size()));
  for (const Frame& f : video.frames) {
    if (f.width() != video.width || f.height() != video.height || f.channels() != video.channels)
      throw std::invalid_argument("encode_video: frame extents differ from the video header");
    w.raw(frame_to_bytes(f));
  }
  return w.take();
}

Video decode_video(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "FVID video");
  r.expect_magic("FVID");
  Video v;
  v.width = static_cast<int>(r.u32());
  v.height = static_cast<int>(r.u32());
  v.channels = r.u16();
  const std::uint32_t count = r.u32();
  if (v.width <= 0 || v.height <= 0 || v.channels <= 0) throw std::runtime_error("FVID video: invalid extents");
  const auto frame_bytes = static_cast<std::size_t>(v.width) * v.height * v.channels;
  for (std::uint32_t i = 0; i < count; ++i) v.frames.push_back(frame_from_bytes(r.raw(frame_bytes), v.channels, v.height, v.width));
  return v;
}

void write_video(const std::string& path, const Video& video) { write_file(path, encode_video(video)); }
Video read_video(const std::string& path) { return decode_video(read_file(path)); }

std::vector<std::uint8_t> encode_checkpoint(const grad::ParamSet& params) {
  ByteWriter w;
  w.raw(std::string("FCKP"));
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name);
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (int e : t.extents()) w.u32(static_cast<std::uint32_t>(e));
    for (Eigen::Index i = 0; i < t.size(); ++i) w.f64(t[i]);
  }
  return w.take();
}

grad::ParamSet decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "FCKP checkpoint");
  r.expect_magic("FCKP");
  const std::uint32_t count = r.u32();
  grad::ParamSet out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str(r.u32());
    const int rank = r.u8();
    grad::Extents extents;
    for (int d = 0; d < rank; ++d) {
      const std::uint32_t e = r.u32();
      if (e == 0 || e > (1u << 24)) throw std::runtime_error("FCKP checkpoint: bad extent in entry '" + name + "'");
      extents.push_back(static_cast<int>(e));
    }
    grad::Tensor t(extents);
    for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = r.f64();
    out.emplace(std::move(name), std::move(t));
  }
  if (!r.done()) throw std::runtime_error("FCKP checkpoint: trailing bytes after " + std::to_string(count) + " entries");
  return out;
}

void write_checkpoint(const std::string& path, const grad::ParamSet& params) { write_file(path, encode_checkpoint(params)); }
grad::ParamSet read_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace flowcodec::motion
