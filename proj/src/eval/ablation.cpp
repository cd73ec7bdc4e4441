// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/eval/ablation.hpp"

#include "flowcodec/grad/tape.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace flowcodec::eval {

namespace {
using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
}  // namespace

RDPoint rd_point(const online::EncodeResult& encoded, const motion::Video& video) {
  if (encoded.records.empty()) throw std::invalid_argument("rd_point: nothing was encoded");
  double bits = 0.0, psnr = 0.0;
  for (const auto& r : encoded.records) {
    bits += r.coded_bits;
    psnr += r.psnr;
  }
  const double pixels = static_cast<double>(video.width) * video.height * static_cast<double>(encoded.records.size());
  return {bits / pixels, psnr / static_cast<double>(encoded.records.size())};
}

CodingRun run_coding(const motion::Video& video, const codec::Model& model, const online::GopConfig& gop,
                     online::OptMode mode, const online::OptConfig& cfg, const online::WindowConfig& wcfg) {
  CodingRun run;
  auto t0 = Clock::now();
  run.encoded = online::encode_sequence(video, model, gop, mode, cfg, wcfg);
  run.encode_seconds = seconds_since(t0);

  const std::uint64_t iters = online::optimizer_iterations_total();
  const std::uint64_t tapes = grad::Tape::recording_tapes_created();
  t0 = Clock::now();
  const online::DecodeResult decoded = online::decode_sequence(run.encoded.container, model);
  run.decode_seconds = seconds_since(t0);
  run.decoder_optimizer_iterations = online::optimizer_iterations_total() - iters;
  run.decoder_recording_tapes = grad::Tape::recording_tapes_created() - tapes;

  run.decoded_exactly = decoded.video.frames.size() == run.encoded.reconstructions.size();
  for (std::size_t i = 0; run.decoded_exactly && i < decoded.video.frames.size(); ++i)
    run.decoded_exactly = decoded.video.frames[i].samples.bit_equal(run.encoded.reconstructions[i].samples);
  run.point = rd_point(run.encoded, video);
  return run;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "iters" || name == "N") return SweepAxis::iterations;
  if (name == "window" || name == "W") return SweepAxis::window;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (iters, window)");
}

std::string to_string(SweepAxis axis) { return axis == SweepAxis::iterations ? "iters" : "window"; }

std::vector<int> default_sweep(SweepAxis axis) {
  if (axis == SweepAxis::iterations) return {0, 100, 500, 1000, 1500, 2000, 2500};
  return {2, 3, 4, 5};
}

AblationReport run_ablation(const AblationConfig& config, const CellCallback& on_cell) {
  const std::vector<int> values = config.values.empty() ? default_sweep(config.axis) : config.values;
  AblationReport report;

  // Cells run one after another; the report is assembled here only.
  std::vector<std::pair<std::string, std::optional<codec::Model>>> models;
  for (const std::string& path : config.checkpoints) {
    try {
      models.emplace_back(path, codec::load_model(path));
    } catch (const std::exception&) {
      models.emplace_back(path, std::nullopt);
    }
  }

  for (const auto& [name, video] : config.datasets) {
    for (int value : values) {
      for (const auto& [path, model] : models) {
        AblationCell cell{name, path, model.has_value(), model ? model->lambda : 0.0, value, {}, 0, 0, 0};
        if (model) {
          online::GopConfig gop{config.intra_period, model->lambda};
          online::OptConfig opt = config.opt;
          online::WindowConfig w = config.window;
          online::OptMode mode = online::OptMode::single;
          if (config.axis == SweepAxis::iterations) {
            opt.iterations = value;
          } else {
            mode = online::OptMode::window;
            w.size = value;
          }
          const CodingRun run = run_coding(video, *model, gop, mode, opt, w);
          cell.point = run.point;
          cell.encode_seconds = run.encode_seconds;
          cell.decode_seconds = run.decode_seconds;
          cell.decoder_iterations = run.decoder_optimizer_iterations;
        }
        report.cells.push_back(cell);
        if (on_cell) on_cell(cell);
      }
    }
  }

  for (const auto& [name, video] : config.datasets) {
    auto curve_for = [&](int value) {
      RDCurve c;
      for (const AblationCell& cell : report.cells)
        if (cell.present && cell.dataset == name && cell.value == value) c.push_back(cell.point);
      return c;
    };
    const RDCurve anchor = curve_for(values.front());
    for (int value : values) {
      AblationRow row{name, value, std::nullopt, ""};
      try {
        if (value == values.front()) {
          validate_curve(anchor);
          row.bd_rate = 0.0;
          row.note = "anchor";
        } else {
          row.bd_rate = bd_rate(anchor, curve_for(value));
        }
      } catch (const std::invalid_argument& e) {
        row.note = e.what();
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string format_cell(const AblationCell& c, SweepAxis axis) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "cell dataset=%s checkpoint=%s status=%s lambda=%g %s=%d bpp=%.6f psnr=%.4f enc_s=%.3f dec_s=%.3f "
                "dec_iters=%llu",
                c.dataset.c_str(), c.checkpoint.c_str(), c.present ? "ok" : "absent", c.lambda,
                to_string(axis).c_str(), c.value, c.point.rate, c.point.psnr, c.encode_seconds, c.decode_seconds,
                static_cast<unsigned long long>(c.decoder_iterations));
  return buf;
}

std::string format_row(const AblationRow& row, SweepAxis axis, int anchor) {
  char bd[32] = "na";
  if (row.bd_rate) std::snprintf(bd, sizeof bd, "%.4f", *row.bd_rate);
  std::string note = row.note;
  for (char& ch : note)
    if (ch == ' ') ch = '_';
  return "bdrate dataset=" + row.dataset + " " + to_string(axis) + "=" + std::to_string(row.value) +
         " anchor=" + std::to_string(anchor) + " bd_rate=" + bd + " note=" + (note.empty() ? "-" : note);
}

}  // namespace flowcodec::eval
