// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/online/optimizer.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flowcodec::online {

using codec::DecodeOptions;
using codec::LatentPair;
using codec::PassResult;
using grad::Tensor;
using grad::Var;
using motion::Frame;

namespace {

std::atomic<std::uint64_t> g_iterations{0};

bool finite(const Tensor& t) { return t.all_finite(); }

PassResult dec_i(const Tensor& y, const Tensor& z, const Frame& current, const Frame& reference,
                 const codec::Codec& codec, double lambda) {
  return codec::decode_pass({{y}, {z}}, reference, current, codec, lambda, DecodeOptions::inference());
}

struct Gradient {
  double loss = 0.0;
  Tensor dy, dz;
  bool ok() const { return std::isfinite(loss) && finite(dy) && finite(dz); }
};

void descend(Tensor& y, Tensor& z, const Gradient& g, double lr) {
  y.values() -= lr * g.dy.values();
  z.values() -= lr * g.dz.values();
}

bool check_now(long i, const OptConfig& cfg) { return (i + 1) % cfg.keep_best_every == 0 || i + 1 == cfg.iterations; }

OptResult start(const PassResult& initial, double cost) {
  OptResult r;
  r.initial_rd = initial.rd;
  r.initial_cost = cost;
  r.trace.best_cost.push_back(cost);
  return r;
}

void keep(OptResult& r, const PassResult& p, double cost) {
  r.latents = {p.y_hat, p.z_hat};
  r.g_hat = p.g_hat;
  r.reconstruction = p.reconstruction;
  r.flow = p.flow;
  r.rd = p.rd;
  r.cost = cost;
}

}  // namespace

void OptConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("OptConfig: iterations must be >= 0");
  if (!(learning_rate.initial > 0.0)) throw std::invalid_argument("OptConfig: initial step size must be > 0");
  if (keep_best_every < 1) throw std::invalid_argument("OptConfig: keep-best interval must be >= 1");
}

double lr_schedule(long iteration, const OptConfig& cfg) { return cfg.learning_rate.at(iteration); }

void WindowConfig::validate() const {
  if (size < 2) throw std::invalid_argument("WindowConfig: window size must be >= 2");
  if (weights.size() < static_cast<std::size_t>(size - 1))
    throw std::invalid_argument("WindowConfig: need " + std::to_string(size - 1) + " weights for window " +
                                std::to_string(size));
  if (weights.front() != 1.0) throw std::invalid_argument("WindowConfig: the first weight must be 1");
}

OptResult optimize_latents(const LatentPair& initial, const Frame& current, const Frame& reference,
                           const codec::Codec& codec, double lambda, const OptConfig& cfg) {
  cfg.validate();
  if (initial.y.state != codec::QuantState::raw || initial.z.state != codec::QuantState::raw)
    throw std::logic_error("optimize_latents: initial latents must be raw");
  Tensor y = initial.y.values, z = initial.z.values;

  const PassResult first = dec_i(y, z, current, reference, codec, lambda);
  OptResult r = start(first, first.rd.total);
  keep(r, first, first.rd.total);

  for (long i = 0; i < cfg.iterations; ++i) {
    ++g_iterations;
    ++r.trace.iterations_run;
    Gradient g;
    {
      grad::Tape tape;
      const grad::BoundParams p(tape, codec.params, false);
      const Var vy = tape.leaf(y, true), vz = tape.leaf(z, true);
      const codec::PassGraph pass =
          codec::decode_pass(vy, vz, tape.constant(reference.samples), tape.constant(current.samples), p,
                             codec.config, lambda, DecodeOptions::optimization(grad::mix_seed(cfg.seed, i)));
      g.loss = pass.total.value().item();
      auto grads = grad::backward(pass.total, {vy, vz});
      g.dy = std::move(grads[0]);
      g.dz = std::move(grads[1]);
    }
    if (!g.ok()) {
      ++r.trace.skipped;
      r.trace.best_cost.push_back(r.cost);
      continue;
    }
    descend(y, z, g, lr_schedule(i, cfg));
    if (check_now(i, cfg)) {
      const PassResult cand = dec_i(y, z, current, reference, codec, lambda);
      if (cand.rd.total < r.cost) {
        keep(r, cand, cand.rd.total);
        r.trace.best_iteration = i + 1;
      }
    }
    r.trace.best_cost.push_back(r.cost);
  }
  return r;
}

OptResult optimize_single_frame(const Frame& current, const Frame& reference, const codec::Model& model,
                                double lambda, const OptConfig& cfg) {
  const motion::FlowField flow = motion::estimate_flow(current, reference, model.flow);
  return optimize_latents(codec::encode_mv(flow, model.codec), current, reference, model.codec, lambda, cfg);
}

double window_loss(std::span<const double> per_frame, std::span<const double> weights) {
  if (weights.size() < per_frame.size()) throw std::invalid_argument("window_loss: missing weights");
  double total = 0.0;
  for (std::size_t j = 0; j < per_frame.size(); ++j) total += weights[j] * per_frame[j];
  return total;
}

namespace {

// Rounded window cost: frame 0 from the candidate latents, later frames by the frozen
// pipeline on top of the previous reconstruction.
struct WindowEval {
  PassResult first;
  double cost = 0.0;
};

WindowEval window_dec_i(const Tensor& y, const Tensor& z, std::span<const Frame> frames, const Frame& reference,
                        const codec::Model& model, double lambda, std::span<const double> weights) {
  WindowEval e;
  e.first = dec_i(y, z, frames[0], reference, model.codec, lambda);
  std::vector<double> per_frame{e.first.rd.total};
  Frame previous = e.first.reconstruction;
  for (std::size_t j = 1; j < frames.size(); ++j) {
    const LatentPair l = codec::encode_mv(motion::estimate_flow(frames[j], previous, model.flow), model.codec);
    const PassResult p = dec_i(l.y.values, l.z.values, frames[j], previous, model.codec, lambda);
    per_frame.push_back(p.rd.total);
    previous = p.reconstruction;
  }
  e.cost = window_loss(per_frame, weights);
  return e;
}

}  // namespace

OptResult optimize_window(std::span<const Frame> frames, const Frame& reference, const codec::Model& model,
                          double lambda, const WindowConfig& wcfg, const OptConfig& cfg) {
  cfg.validate();
  if (frames.empty()) throw std::invalid_argument("optimize_window: no frame to code");
  WindowConfig effective = wcfg;
  effective.size = static_cast<int>(frames.size()) + 1;
  effective.validate();
  const std::span<const double> weights(effective.weights.data(), frames.size());

  const LatentPair initial =
      codec::encode_mv(motion::estimate_flow(frames[0], reference, model.flow), model.codec);
  Tensor y = initial.y.values, z = initial.z.values;

  const WindowEval first = window_dec_i(y, z, frames, reference, model, lambda, weights);
  OptResult r = start(first.first, first.cost);
  keep(r, first.first, first.cost);

  for (long i = 0; i < cfg.iterations; ++i) {
    ++g_iterations;
    ++r.trace.iterations_run;
    const std::uint64_t seed = grad::mix_seed(cfg.seed, i);
    Gradient g;
    {
      grad::Tape tape;
      const grad::BoundParams p(tape, model.codec.params, false);
      const Var vy = tape.leaf(y, true), vz = tape.leaf(z, true);
      const codec::PassGraph head =
          codec::decode_pass(vy, vz, tape.constant(reference.samples), tape.constant(frames[0].samples), p,
                             model.codec.config, lambda, DecodeOptions::optimization(seed));
      Var loss = grad::scale(head.total, weights[0]);
      Var previous = head.reconstruction;
      for (std::size_t j = 1; j < frames.size(); ++j) {
        // Later frames: motion from the frozen estimator on the candidate reconstruction;
        // gradients reach y, z through the reference path only.
        const LatentPair l =
            codec::encode_mv(motion::estimate_flow(frames[j], Frame(previous.value()), model.flow), model.codec);
        const codec::PassGraph tail = codec::decode_pass(
            tape.constant(l.y.values), tape.constant(l.z.values), previous, tape.constant(frames[j].samples), p,
            model.codec.config, lambda, DecodeOptions::optimization(grad::mix_seed(seed, j)));
        loss = grad::add(loss, grad::scale(tail.total, weights[j]));
        previous = tail.reconstruction;
      }
      g.loss = loss.value().item();
      auto grads = grad::backward(loss, {vy, vz});
      g.dy = std::move(grads[0]);
      g.dz = std::move(grads[1]);
    }
    if (!g.ok()) {
      ++r.trace.skipped;
      r.trace.best_cost.push_back(r.cost);
      continue;
    }
    descend(y, z, g, lr_schedule(i, cfg));
    if (check_now(i, cfg)) {
      const WindowEval cand = window_dec_i(y, z, frames, reference, model, lambda, weights);
      if (cand.cost < r.cost) {
        keep(r, cand.first, cand.cost);
        r.trace.best_iteration = i + 1;
      }
    }
    r.trace.best_cost.push_back(r.cost);
  }
  return r;
}

int window_schedule(int gop_length, int frame_index, int window) {
  if (gop_length < 1 || frame_index < 0 || frame_index >= gop_length)
    throw std::invalid_argument("window_schedule: frame index outside the GOP");
  if (window < 2) throw std::invalid_argument("window_schedule: window must be >= 2");
  // Frames from the reference (frame_index - 1) through the end of the GOP.
  const int remaining = gop_length - frame_index + 1;
  return std::max(2, std::min(window, remaining));
}

std::uint64_t optimizer_iterations_total() { return g_iterations.load(); }

}  // namespace flowcodec::online
