// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/eval/metrics.hpp"
#include "flowcodec/online/sequence.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flowcodec::eval {

// Mean bits per pixel over the sequence and mean per-frame PSNR.
RDPoint rd_point(const online::EncodeResult& encoded, const motion::Video& video);

// One encode + decode of a video, with timings.
struct CodingRun {
  online::EncodeResult encoded;
  RDPoint point;
  double encode_seconds = 0.0;
  double decode_seconds = 0.0;
  std::uint64_t decoder_optimizer_iterations = 0;
  std::uint64_t decoder_recording_tapes = 0;
  bool decoded_exactly = false;  // decoder output bit-identical to encoder reconstructions
};

CodingRun run_coding(const motion::Video& video, const codec::Model& model, const online::GopConfig& gop,
                     online::OptMode mode, const online::OptConfig& cfg, const online::WindowConfig& wcfg);

enum class SweepAxis { iterations, window };

SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);
std::vector<int> default_sweep(SweepAxis axis);

struct AblationConfig {
  SweepAxis axis = SweepAxis::iterations;
  std::vector<int> values;  // first value is the anchor
  std::vector<std::string> checkpoints;  // one trained model per lambda
  std::vector<std::pair<std::string, motion::Video>> datasets;
  int intra_period = 12;
  online::OptConfig opt;         // iteration count used by the window sweep
  online::WindowConfig window;   // weights used by the window sweep
};

struct AblationCell {
  std::string dataset;
  std::string checkpoint;
  bool present = false;
  double lambda = 0.0;
  int value = 0;
  RDPoint point;
  double encode_seconds = 0.0;
  double decode_seconds = 0.0;
  std::uint64_t decoder_iterations = 0;
};

struct AblationRow {
  std::string dataset;
  int value = 0;
  std::optional<double> bd_rate;  // vs the anchor value; empty when no curve could be fit
  std::string note;
};

struct AblationReport {
  std::vector<AblationCell> cells;
  std::vector<AblationRow> rows;
};

using CellCallback = std::function<void(const AblationCell&)>;

// Checkpoints that cannot be loaded are listed as absent cells and skipped.
AblationReport run_ablation(const AblationConfig& config, const CellCallback& on_cell = {});

// cell dataset=.. checkpoint=.. status=<ok|absent> lambda=.. <axis>=.. bpp=.. psnr=.. enc_s=.. dec_s=.. dec_iters=..
std::string format_cell(const AblationCell& cell, SweepAxis axis);
// bdrate dataset=.. <axis>=.. anchor=.. bd_rate=<percent|na> note=..
std::string format_row(const AblationRow& row, SweepAxis axis, int anchor);

}  // namespace flowcodec::eval
