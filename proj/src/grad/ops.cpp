// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowcodec::grad {

namespace {

void require_rank3(const Tensor& t, const char* op) {
  if (t.rank() != 3) throw std::invalid_argument(std::string(op) + ": expected (C,H,W), got " + describe(t.extents()));
}

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_extents(a.value(), b.value(), "add");
  Tensor out(a.extents(), a.value().values() + b.value().values());
  return a.tape().push(std::move(out), {a, b}, [a, b](const Eigen::ArrayXd& g, GradBuffer& grads) {
    if (a.requires_grad()) grads.slot(a.id()) += g;
    if (b.requires_grad()) grads.slot(b.id()) += g;
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_extents(a.value(), b.value(), "sub");
  Tensor out(a.extents(), a.value().values() - b.value().values());
  return a.tape().push(std::move(out), {a, b}, [a, b](const Eigen::ArrayXd& g, GradBuffer& grads) {
    if (a.requires_grad()) grads.slot(a.id()) += g;
    if (b.requires_grad()) grads.slot(b.id()) -= g;
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_extents(a.value(), b.value(), "mul");
  Tensor out(a.extents(), a.value().values() * b.value().values());
  return a.tape().push(std::move(out), {a, b}, [a, b](const Eigen::ArrayXd& g, GradBuffer& grads) {
    if (a.requires_grad()) grads.slot(a.id()) += g * b.value().values();
    if (b.requires_grad()) grads.slot(b.id()) += g * a.value().values();
  });
}

Var scale(const Var& x, Scalar factor) {
  Tensor out(x.extents(), x.value().values() * factor);
  return x.tape().push(std::move(out), {x}, [x, factor](const Eigen::ArrayXd& g, GradBuffer& grads) {
    grads.slot(x.id()) += g * factor;
  });
}

Var leaky_relu(const Var& x, Scalar slope) {
  const auto& v = x.value().values();
  Tensor out(x.extents(), (v >= 0.0).select(v, v * slope));
  return x.tape().push(std::move(out), {x}, [x, slope](const Eigen::ArrayXd& g, GradBuffer& grads) {
    const auto& v = x.value().values();
    grads.slot(x.id()) += (v >= 0.0).select(g, g * slope);
  });
}

Var sum(const Var& x) {
  const auto& v = x.value().values();
  Scalar acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v[i];
  return x.tape().push(Tensor::scalar(acc), {x}, [x](const Eigen::ArrayXd& g, GradBuffer& grads) {
    grads.slot(x.id()) += g[0];
  });
}

Var mean(const Var& x) {
  const auto& v = x.value().values();
  Scalar acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v[i];
  const Scalar n = static_cast<Scalar>(v.size());
  return x.tape().push(Tensor::scalar(acc / n), {x}, [x, n](const Eigen::ArrayXd& g, GradBuffer& grads) {
    grads.slot(x.id()) += g[0] / n;
  });
}

Var concat_channels(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const Tensor& first = parts.front().value();
  require_rank3(first, "concat_channels");
  int channels = 0;
  for (const Var& p : parts) {
    const Tensor& t = p.value();
    require_rank3(t, "concat_channels");
    if (t.height() != first.height() || t.width() != first.width()) {
      throw std::invalid_argument("concat_channels: spatial mismatch " + describe(first.extents()) + " vs " +
                                  describe(t.extents()));
    }
    channels += t.channels();
  }
  Tensor out({channels, first.height(), first.width()});
  Eigen::Index offset = 0;
  std::vector<Eigen::Index> offsets;
  for (const Var& p : parts) {
    offsets.push_back(offset);
    out.values().segment(offset, p.value().size()) = p.value().values();
    offset += p.value().size();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().push(std::move(out), parts,
                                   [inputs, offsets](const Eigen::ArrayXd& g, GradBuffer& grads) {
                                     for (std::size_t i = 0; i < inputs.size(); ++i) {
                                       if (!inputs[i].requires_grad()) continue;
                                       const auto n = inputs[i].value().size();
                                       grads.slot(inputs[i].id()) += g.segment(offsets[i], n);
                                     }
                                   });
}

Var slice_channels(const Var& x, int begin, int count) {
  const Tensor& t = x.value();
  require_rank3(t, "slice_channels");
  if (begin < 0 || count <= 0 || begin + count > t.channels()) {
    throw std::invalid_argument("slice_channels: range [" + std::to_string(begin) + ", " +
                                std::to_string(begin + count) + ") outside " + describe(t.extents()));
  }
  const Eigen::Index plane = static_cast<Eigen::Index>(t.height()) * t.width();
  Tensor out({count, t.height(), t.width()}, t.values().segment(begin * plane, count * plane));
  return x.tape().push(std::move(out), {x}, [x, begin, plane](const Eigen::ArrayXd& g, GradBuffer& grads) {
    grads.slot(x.id()).segment(begin * plane, g.size()) += g;
  });
}

Var channel_norm(const Var& x) {
  const Tensor& t = x.value();
  require_rank3(t, "channel_norm");
  const int C = t.channels();
  const Eigen::Index plane = static_cast<Eigen::Index>(t.height()) * t.width();
  Tensor out({1, t.height(), t.width()});
  for (Eigen::Index p = 0; p < plane; ++p) {
    Scalar acc = 0.0;
    for (int c = 0; c < C; ++c) acc += t[c * plane + p] * t[c * plane + p];
    out[p] = std::sqrt(acc);
  }
  Eigen::ArrayXd norms = out.values();
  return x.tape().push(std::move(out), {x}, [x, C, plane, norms](const Eigen::ArrayXd& g, GradBuffer& grads) {
    const Tensor& in = x.value();
    auto& gx = grads.slot(x.id());
    for (Eigen::Index p = 0; p < plane; ++p) {
      if (norms[p] == 0.0) continue;
      const Scalar s = g[p] / norms[p];
      for (int c = 0; c < C; ++c) gx[c * plane + p] += s * in[c * plane + p];
    }
  });
}

Var add_noise(const Var& x, const Tensor& noise) {
  require_same_extents(x.value(), noise, "add_noise");
  Tensor out(x.extents(), x.value().values() + noise.values());
  return x.tape().push(std::move(out), {x}, [x](const Eigen::ArrayXd& g, GradBuffer& grads) {
    grads.slot(x.id()) += g;
  });
}

Var round_values(const Var& x) {
  Tensor out(x.extents(), x.value().values().unaryExpr([](Scalar v) { return std::round(v); }));
  return x.tape().push(std::move(out), {x}, {});
}

}  // namespace flowcodec::grad
