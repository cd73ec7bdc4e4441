// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/params.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace flowcodec::grad {

BoundParams::BoundParams(Tape& tape, const ParamSet& params, bool requires_grad) {
  for (const auto& [name, value] : params) vars_.emplace(name, tape.leaf(value, requires_grad));
}

const Var& BoundParams::operator[](const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw std::out_of_range("missing parameter '" + name + "'");
  return it->second;
}

GradSet BoundParams::gradients(const Var& loss) const {
  std::vector<Var> leaves;
  leaves.reserve(vars_.size());
  for (const auto& [name, var] : vars_) leaves.push_back(var);
  auto grads = backward(loss, leaves);
  GradSet out;
  std::size_t i = 0;
  for (const auto& [name, var] : vars_) out.emplace(name, std::move(grads[i++]));
  return out;
}

std::uint64_t digest(const ParamSet& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [name, t] : params) {
    feed(name.data(), name.size());
    for (int e : t.extents()) feed(&e, sizeof e);
    feed(t.data(), sizeof(Scalar) * static_cast<std::size_t>(t.size()));
  }
  return h;
}

void merge_prefixed(ParamSet& to, const ParamSet& from, const std::string& prefix) {
  for (const auto& [name, t] : from)
    if (name.rfind(prefix, 0) == 0) to[name] = t;
}

ParamSet select_prefixed(const ParamSet& from, const std::string& prefix) {
  ParamSet out;
  merge_prefixed(out, from, prefix);
  return out;
}

void Adam::step(ParamSet& params, const GradSet& grads, double learning_rate) {
  ++steps_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  for (auto& [name, p] : params) {
    auto g = grads.find(name);
    if (g == grads.end()) continue;
    require_same_extents(p, g->second, "Adam::step");
    auto [it, fresh] = moments_.try_emplace(name);
    auto& [m, v] = it->second;
    if (fresh) {
      m = Eigen::ArrayXd::Zero(p.size());
      v = Eigen::ArrayXd::Zero(p.size());
    }
    const auto& gv = g->second.values();
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * gv;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * gv.square();
    p.values() -= learning_rate * (m / c1) / ((v / c2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace flowcodec::grad
