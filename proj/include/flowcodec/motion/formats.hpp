// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/params.hpp"
#include "flowcodec/motion/frame.hpp"
#include "flowcodec/motion/labels.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flowcodec::motion {

// "MVL1" records: u32 width, u32 height, u16 stride, u16 precision, u32 metadata length,
// metadata bytes, then (i16 horizontal, i16 vertical) per cell, row-major. A label file
// holds one record per frame, back to back.
std::vector<std::uint8_t> encode_labels(std::span<const MVLabelGrid> grids);
std::vector<MVLabelGrid> decode_labels(std::span<const std::uint8_t> bytes);
void write_labels(const std::string& path, std::span<const MVLabelGrid> grids);
std::vector<MVLabelGrid> read_labels(const std::string& path);

// "FVID": u32 width, u32 height, u16 channels, u32 frame count, then 8-bit planar frames.
// Samples are clamped to [0, 1] and rounded on write; divided by 255 on read.
std::vector<std::uint8_t> encode_video(const Video& video);
Video decode_video(std::span<const std::uint8_t> bytes);
void write_video(const std::string& path, const Video& video);
Video read_video(const std::string& path);

// Round-trip of one frame through 8-bit storage.
Frame quantize_to_8bit(const Frame& frame);
std::vector<std::uint8_t> frame_to_bytes(const Frame& frame);
Frame frame_from_bytes(std::span<const std::uint8_t> bytes, int channels, int height, int width);

// "FCKP": u32 entry count, then per entry u32 name length, name, u8 rank, u32 extents,
// f64 values.
std::vector<std::uint8_t> encode_checkpoint(const grad::ParamSet& params);
grad::ParamSet decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const std::string& path, const grad::ParamSet& params);
grad::ParamSet read_checkpoint(const std::string& path);

}  // namespace flowcodec::motion
