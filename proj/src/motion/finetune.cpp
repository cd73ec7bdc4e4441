// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/finetune.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace flowcodec::motion {

BatchGradient me_loss_gradient(const FlowNet& net, std::span<const FlowSample* const> batch, double lambda_me) {
  grad::Tape tape;
  grad::BoundParams bound(tape, net.params, true);
  grad::Var total;
  for (const FlowSample* s : batch) {
    grad::Var cur = tape.constant(s->current.samples);
    grad::Var ref = tape.constant(s->reference.samples);
    grad::Var label = tape.constant(densify_labels(s->label).components);
    grad::Var flow = estimate_flow(cur, ref, bound, net.config);
    grad::Var loss = me_loss(cur, ref, flow, label, lambda_me);
    total = total.valid() ? grad::add(total, loss) : loss;
  }
  grad::Var mean_loss = grad::scale(total, 1.0 / static_cast<double>(batch.size()));
  return {mean_loss.value().item(), bound.gradients(mean_loss)};
}

FlowNet finetune_flow(FlowNet net, std::span<const FlowSample> dataset, const FinetuneConfig& config,
                      const FinetuneLogger& log) {
  if (dataset.empty()) throw std::invalid_argument("finetune_flow: empty dataset");
  if (!(config.lambda_me > 0.0)) throw std::invalid_argument("finetune_flow: lambda_ME must be positive");
  if (config.batch_size < 1) throw std::invalid_argument("finetune_flow: batch size must be >= 1");

  grad::Adam adam;
  std::vector<std::size_t> order(dataset.size());
  std::size_t cursor = order.size();
  long epoch = -1;
  double epoch_loss = 0.0;
  long epoch_steps = 0;

  for (long it = 0; it < config.iterations; ++it) {
    std::vector<const FlowSample*> batch;
    while (static_cast<int>(batch.size()) < config.batch_size) {
      if (cursor == order.size()) {
        if (epoch >= 0 && log) log({epoch, it, epoch_loss / static_cast<double>(std::max(epoch_steps, 1L))});
        ++epoch;
        epoch_loss = 0.0;
        epoch_steps = 0;
        std::iota(order.begin(), order.end(), std::size_t{0});
        grad::Rng rng(grad::mix_seed(config.seed, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
        cursor = 0;
      }
      batch.push_back(&dataset[order[cursor++]]);
    }

    auto [loss, grads] = me_loss_gradient(net, batch, config.lambda_me);
    if (!std::isfinite(loss)) throw std::runtime_error("finetune_flow: non-finite loss at iteration " + std::to_string(it));
    epoch_loss += loss;
    ++epoch_steps;

    const double lr = config.learning_rate.at(it);
    if (config.update == UpdateRule::adam) {
      adam.step(net.params, grads, lr);
    } else {
      for (auto& [name, p] : net.params) p.values() -= lr * grads.at(name).values();
    }
  }
  if (log && epoch_steps > 0) log({epoch, config.iterations, epoch_loss / static_cast<double>(epoch_steps)});
  return net;
}

FlowQuality assess_flow(const FlowNet& net, std::span<const FlowSample> dataset) {
  FlowQuality q;
  if (dataset.empty()) return q;
  for (const FlowSample& s : dataset) {
    const FlowField flow = estimate_flow(s.current, s.reference, net);
    q.epe += epe(flow, densify_labels(s.label));
    q.warp_mse += mse(s.current, warp(s.reference, flow));
  }
  q.epe /= static_cast<double>(dataset.size());
  q.warp_mse /= static_cast<double>(dataset.size());
  return q;
}

}  // namespace flowcodec::motion
