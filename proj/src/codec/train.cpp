// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/codec/train.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowcodec::codec {

namespace {

struct Prepared {
  const TrainSample* sample;
  grad::Tensor flow;
};

std::vector<Prepared> prepare(std::span<const TrainSample> data, const motion::FlowNet& flow) {
  std::vector<Prepared> out;
  out.reserve(data.size());
  for (const TrainSample& s : data) {
    motion::require_same_size(s.current, s.reference, "train_end_to_end");
    out.push_back({&s, motion::estimate_flow(s.current, s.reference, flow).components});
  }
  return out;
}

struct BatchResult {
  double loss = 0.0;
  RDBreakdown mean_rd;
  grad::GradSet grads;
};

BatchResult run_batch(const Codec& codec, std::span<const Prepared* const> batch, double lambda, std::uint64_t seed,
                      bool want_grads) {
  grad::Tape tape(want_grads ? grad::Tape::Mode::record : grad::Tape::Mode::inference);
  const grad::BoundParams p(tape, codec.params, want_grads);
  grad::Var total;
  double d = 0, by = 0, bz = 0, bg = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Prepared& s = *batch[i];
    const grad::Var y = mv_encode(tape.constant(s.flow), p, codec.config);
    const grad::Var z = hyper_encode(y, p, codec.config);
    const PassGraph g =
        decode_pass(y, z, tape.constant(s.sample->reference.samples), tape.constant(s.sample->current.samples), p,
                    codec.config, lambda, DecodeOptions::training(grad::mix_seed(seed, i)));
    total = total.valid() ? grad::add(total, g.total) : g.total;
    d += g.distortion.value().item();
    by += g.bits_y.value().item();
    bz += g.bits_z.value().item();
    bg += g.bits_g.value().item();
  }
  const double n = static_cast<double>(batch.size());
  const grad::Var mean = grad::scale(total, 1.0 / n);
  BatchResult r;
  r.loss = mean.value().item();
  r.mean_rd = RDBreakdown::make(lambda, d / n, by / n, bz / n, bg / n);
  if (want_grads) r.grads = p.gradients(mean);
  return r;
}

}  // namespace

Codec train_end_to_end(Codec codec, const motion::FlowNet& flow, std::span<const TrainSample> dataset,
                       const TrainConfig& config, const TrainLogger& log) {
  if (dataset.empty()) throw std::invalid_argument("train_end_to_end: empty dataset");
  if (config.batch_size < 1) throw std::invalid_argument("train_end_to_end: batch size must be >= 1");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("train_end_to_end: lambda must be positive");
  validate_codec(codec);
  const std::vector<Prepared> data = prepare(dataset, flow);

  grad::Adam adam;
  std::vector<std::size_t> order(data.size());
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  for (long it = 0; it < config.iterations; ++it) {
    std::vector<const Prepared*> batch;
    while (static_cast<int>(batch.size()) < config.batch_size) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        grad::Rng rng(grad::mix_seed(config.seed, 0x5EED0000 + epoch++));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
        cursor = 0;
      }
      batch.push_back(&data[order[cursor++]]);
    }
    const BatchResult r =
        run_batch(codec, batch, config.lambda, grad::mix_seed(config.seed, static_cast<std::uint64_t>(it)), true);
    if (!std::isfinite(r.loss))
      throw std::runtime_error("train_end_to_end: non-finite loss at iteration " + std::to_string(it));
    if (log) log({it, r.loss, r.mean_rd});
    adam.step(codec.params, r.grads, config.learning_rate.at(it));
  }
  return codec;
}

double batch_loss(const Codec& codec, const motion::FlowNet& flow, std::span<const TrainSample> batch, double lambda,
                  std::uint64_t seed) {
  const std::vector<Prepared> data = prepare(batch, flow);
  std::vector<const Prepared*> ptrs;
  for (const Prepared& p : data) ptrs.push_back(&p);
  return run_batch(codec, ptrs, lambda, seed, false).loss;
}

}  // namespace flowcodec::codec
