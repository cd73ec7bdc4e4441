// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flowcodec/grad/tensor.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace flowcodec::grad {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Extents& extents() const { return value().extents(); }
  bool requires_grad() const;
  bool valid() const noexcept { return tape_ != nullptr; }
  Tape& tape() const;
  int id() const noexcept { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Gradient accumulators indexed by node id, allocated on first touch.
class GradBuffer {
 public:
  explicit GradBuffer(const Tape& tape);

  Eigen::ArrayXd& slot(int id);
  bool has(int id) const { return !grads_[static_cast<std::size_t>(id)].empty(); }
  Eigen::ArrayXd& at(int id) { return grads_[static_cast<std::size_t>(id)].back(); }

 private:
  const Tape* tape_;
  // Empty vector means "no gradient yet"; otherwise holds exactly one array.
  std::vector<std::vector<Eigen::ArrayXd>> grads_;
};

using BackwardFn = std::function<void(const Eigen::ArrayXd& grad_out, GradBuffer& grads)>;

// Records primitive executions for reverse-mode replay. An inference tape keeps values
// but never stores backward closures, so nothing on it requires gradients.
class Tape {
 public:
  enum class Mode { record, inference };

  explicit Tape(Mode mode = Mode::record);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return mode_ == Mode::record; }

  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Primitive plumbing: appends an output node. The closure is kept only when the
  // tape records and some input requires gradients.
  Var push(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var push(Tensor value, std::span<const Var> inputs, BackwardFn backward);

  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  friend std::vector<Tensor> backward(const Var& loss, std::span<const Var> leaves);

  // Number of recording tapes constructed in this process.
  static std::uint64_t recording_tapes_created();

 private:
  struct Node {
    Tensor value;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Mode mode_;
  std::deque<Node> nodes_;
};

// Reverse-mode gradients of a scalar loss with respect to each leaf. Leaves that do not
// reach the loss get zeros. Does not mutate the tape, so repeated calls agree bit-for-bit.
std::vector<Tensor> backward(const Var& loss, std::span<const Var> leaves);
inline std::vector<Tensor> backward(const Var& loss, std::initializer_list<Var> leaves) {
  return backward(loss, std::span<const Var>(leaves.begin(), leaves.size()));
}

}  // namespace flowcodec::grad
