// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/motion/flownet.hpp"

#include "flowcodec/grad/ops.hpp"
#include "flowcodec/grad/random.hpp"
#include "flowcodec/motion/warp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flowcodec::motion {

using grad::Tensor;
using grad::Var;

std::string FlowNet::weight_name(int level, int layer) {
  return "flow.l" + std::to_string(level) + ".c" + std::to_string(layer) + ".w";
}

std::string FlowNet::bias_name(int level, int layer) {
  return "flow.l" + std::to_string(level) + ".c" + std::to_string(layer) + ".b";
}

FlowNet init_flownet(const FlowNetConfig& config, std::uint64_t seed) {
  if (config.levels < 1 || config.layers_per_level < 2) throw std::invalid_argument("flow net needs >=1 level, >=2 layers");
  FlowNet net{config, {}};
  grad::Rng rng(seed);
  for (int level = 0; level < config.levels; ++level) {
    for (int layer = 0; layer < config.layers_per_level; ++layer) {
      const int in = layer == 0 ? config.input_channels() : config.hidden_channels;
      const int out = layer + 1 == config.layers_per_level ? 2 : config.hidden_channels;
      const bool last = layer + 1 == config.layers_per_level;
      net.params[FlowNet::weight_name(level, layer)] =
          last ? Tensor::zeros({out, in, 3, 3}) : grad::normal_tensor({out, in, 3, 3}, std::sqrt(2.0 / (9.0 * in)), rng);
      net.params[FlowNet::bias_name(level, layer)] = Tensor::zeros({out});
    }
  }
  return net;
}

Var estimate_flow(const Var& current, const Var& reference, const grad::BoundParams& params,
                  const FlowNetConfig& config) {
  const Tensor& cur = current.value();
  const int div = config.divisor();
  if (cur.rank() != 3 || cur.height() % div != 0 || cur.width() % div != 0) {
    throw std::invalid_argument("estimate_flow: frame extents " + grad::describe(cur.extents()) +
                                " must be divisible by " + std::to_string(div));
  }
  if (!cur.same_extents(reference.value())) {
    throw std::invalid_argument("estimate_flow: current " + grad::describe(cur.extents()) + " vs reference " +
                                grad::describe(reference.value().extents()));
  }

  std::vector<Var> cur_pyr{current}, ref_pyr{reference};
  for (int level = 1; level < config.levels; ++level) {
    cur_pyr.push_back(grad::avgpool2x(cur_pyr.back()));
    ref_pyr.push_back(grad::avgpool2x(ref_pyr.back()));
  }

  grad::Tape& tape = current.tape();
  Var flow;
  for (int level = config.levels - 1; level >= 0; --level) {
    const Tensor& c = cur_pyr[static_cast<std::size_t>(level)].value();
    Var upsampled = flow.valid() ? grad::scale(grad::upsample2x(flow), 2.0)
                                 : tape.constant(Tensor::zeros({2, c.height(), c.width()}));
    Var warped = warp(ref_pyr[static_cast<std::size_t>(level)], upsampled);
    Var h = grad::concat_channels({cur_pyr[static_cast<std::size_t>(level)], warped, upsampled});
    for (int layer = 0; layer < config.layers_per_level; ++layer) {
      h = grad::conv2d(h, params[FlowNet::weight_name(level, layer)], params[FlowNet::bias_name(level, layer)], 1, 1);
      if (layer + 1 < config.layers_per_level) h = grad::leaky_relu(h);
    }
    flow = grad::add(upsampled, h);
  }
  return flow;
}

FlowField estimate_flow(const Frame& current, const Frame& reference, const FlowNet& net) {
  grad::Tape tape(grad::Tape::Mode::inference);
  grad::BoundParams bound(tape, net.params, false);
  return FlowField(estimate_flow(tape.constant(current.samples), tape.constant(reference.samples), bound, net.config).value());
}

}  // namespace flowcodec::motion
