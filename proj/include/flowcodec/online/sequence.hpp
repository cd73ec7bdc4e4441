// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/bitstream/container.hpp"
#include "flowcodec/codec/model.hpp"
#include "flowcodec/online/optimizer.hpp"

#include <functional>
#include <string>
#include <vector>

namespace flowcodec::online {

enum class OptMode { none, single, window };

OptMode parse_mode(const std::string& name);
std::string to_string(OptMode mode);

struct GopConfig {
  int intra_period = 12;
  double lambda = 1024.0;

  void validate() const;
};

bool is_intra(int frame_index, int intra_period);

struct FrameRecord {
  int index = 0;
  bitstream::FrameType type = bitstream::FrameType::intra;
  codec::RDBreakdown rd;    // estimated rates; zero for intra frames
  double coded_bits = 0.0;  // 8 x payload bytes
  double mse = 0.0;
  double psnr = 0.0;
  long iterations = 0;
  long best_iteration = 0;
  int window = 0;  // effective window, 0 outside window mode
};

// frame=<i> type=<I|P> bits_y=.. bits_z=.. bits_g=.. bits=<coded> mse=.. psnr=.. iters=.. best_iter=.. window=..
std::string format_frame_record(const FrameRecord& record);

struct EncodeResult {
  bitstream::Container container;
  std::vector<FrameRecord> records;
  std::vector<motion::Frame> reconstructions;
};

using FrameCallback = std::function<void(const FrameRecord&)>;

// Intra frames are stored raw; every inter frame is coded from the previous
// reconstruction, with the latents chosen according to mode.
EncodeResult encode_sequence(const motion::Video& video, const codec::Model& model, const GopConfig& gop,
                             OptMode mode, const OptConfig& cfg, const WindowConfig& wcfg,
                             const FrameCallback& on_frame = {});

struct DecodeResult {
  motion::Video video;
  std::vector<double> coded_bits;
};

// Runs only inference tapes; rejects containers written with another checkpoint.
DecodeResult decode_sequence(const bitstream::Container& container, const codec::Model& model);

std::uint64_t model_digest(const codec::Model& model);

}  // namespace flowcodec::online
