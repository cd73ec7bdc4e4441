// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/tape.hpp"

#include <atomic>
#include <stdexcept>

namespace flowcodec::grad {

namespace {
std::atomic<std::uint64_t> g_recording_tapes{0};
}

const Tensor& Var::value() const { return tape().value(id_); }

bool Var::requires_grad() const { return tape().requires_grad(id_); }

Tape& Var::tape() const {
  if (!tape_) throw std::logic_error("use of an unbound Var");
  return *tape_;
}

GradBuffer::GradBuffer(const Tape& tape) : tape_(&tape), grads_(tape.size()) {}

Eigen::ArrayXd& GradBuffer::slot(int id) {
  auto& g = grads_[static_cast<std::size_t>(id)];
  if (g.empty()) g.push_back(Eigen::ArrayXd::Zero(tape_->value(id).size()));
  return g.back();
}

Tape::Tape(Mode mode) : mode_(mode) {
  if (mode_ == Mode::record) g_recording_tapes.fetch_add(1, std::memory_order_relaxed);
}

std::uint64_t Tape::recording_tapes_created() { return g_recording_tapes.load(std::memory_order_relaxed); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), recording() && requires_grad, {}});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::push(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::push(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (&in.tape() != this) throw std::invalid_argument("operands recorded on different tapes");
    needs = needs || in.requires_grad();
  }
  needs = needs && recording() && backward;
  nodes_.push_back(Node{std::move(value), needs, needs ? std::move(backward) : BackwardFn{}});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

std::vector<Tensor> backward(const Var& loss, std::span<const Var> leaves) {
  Tape& tape = loss.tape();
  if (loss.value().size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got " + describe(loss.extents()));
  }
  GradBuffer grads(tape);
  if (loss.requires_grad()) {
    grads.slot(loss.id()).setOnes();
    for (int id = loss.id(); id >= 0; --id) {
      const auto& node = tape.nodes_[static_cast<std::size_t>(id)];
      if (!node.backward || !grads.has(id)) continue;
      node.backward(grads.at(id), grads);
    }
  }
  std::vector<Tensor> out;
  out.reserve(leaves.size());
  for (const Var& leaf : leaves) {
    if (&leaf.tape() != &tape) throw std::invalid_argument("backward: leaf recorded on a different tape");
    if (grads.has(leaf.id())) {
      out.emplace_back(leaf.extents(), grads.at(leaf.id()));
    } else {
      out.push_back(Tensor::zeros(leaf.extents()));
    }
  }
  return out;
}

}  // namespace flowcodec::grad
