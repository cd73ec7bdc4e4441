// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/entropy_math.hpp"
#include "flowcodec/grad/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flowcodec::grad {

namespace {

Scalar logistic_slope(Scalar t) { return sigmoid(t) * sigmoid(-t); }

// Mass of one logistic component on [v-0.5, v+0.5], computed on the lower tail side.
Scalar logistic_component_mass(Scalar v, Scalar loc, Scalar scale) {
  const Scalar u = (v + 0.5 - loc) / scale;
  const Scalar l = (v - 0.5 - loc) / scale;
  return v > loc ? sigmoid(-l) - sigmoid(-u) : sigmoid(u) - sigmoid(l);
}

struct MixtureEval {
  Scalar mass = 0.0;
  std::vector<Scalar> weights;     // softmax of logits
  std::vector<Scalar> comp_mass;   // per-component interval mass
};

MixtureEval evaluate_mixture(Scalar v, const MixtureView& m) {
  const std::size_t K = m.logits.size();
  MixtureEval e;
  e.weights.resize(K);
  e.comp_mass.resize(K);
  Scalar top = m.logits[0];
  for (std::size_t k = 1; k < K; ++k) top = std::max(top, m.logits[k]);
  Scalar z = 0.0;
  for (std::size_t k = 0; k < K; ++k) z += (e.weights[k] = std::exp(m.logits[k] - top));
  for (std::size_t k = 0; k < K; ++k) {
    e.weights[k] /= z;
    e.comp_mass[k] = logistic_component_mass(v, m.locations[k], std::exp(m.log_scales[k]));
    e.mass += e.weights[k] * e.comp_mass[k];
  }
  return e;
}

}  // namespace

double logistic_mixture_mass(double v, const MixtureView& m) { return evaluate_mixture(v, m).mass; }

Var gaussian_bits(const Var& x, const Var& mean, const Var& scale_param) {
  require_same_extents(x.value(), mean.value(), "gaussian_bits");
  require_same_extents(x.value(), scale_param.value(), "gaussian_bits");
  const Tensor& v = x.value();
  const Tensor& mu = mean.value();
  const Tensor& sp = scale_param.value();
  Tensor out(v.extents());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Scalar p = gaussian_interval_mass(v[i], mu[i], gaussian_scale(sp[i]));
    out[i] = p < kProbabilityFloor ? 16.0 : -std::log(p) / kLn2;
  }
  return x.tape().push(std::move(out), {x, mean, scale_param},
                       [x, mean, scale_param](const Eigen::ArrayXd& g, GradBuffer& grads) {
                         const Tensor& v = x.value();
                         const Tensor& mu = mean.value();
                         const Tensor& sp = scale_param.value();
                         Scalar* gx = x.requires_grad() ? grads.slot(x.id()).data() : nullptr;
                         Scalar* gm = mean.requires_grad() ? grads.slot(mean.id()).data() : nullptr;
                         Scalar* gs = scale_param.requires_grad() ? grads.slot(scale_param.id()).data() : nullptr;
                         for (Eigen::Index i = 0; i < v.size(); ++i) {
                           const Scalar s = gaussian_scale(sp[i]);
                           const Scalar d = v[i] - mu[i];
                           const Scalar a = std::abs(d);
                           const Scalar u = (0.5 - a) / s;
                           const Scalar l = (-0.5 - a) / s;
                           const Scalar p = normal_cdf(u) - normal_cdf(l);
                           if (p < kProbabilityFloor) continue;
                           const Scalar dbits = -g[i] / (p * kLn2);
                           const Scalar pu = normal_pdf(u), pl = normal_pdf(l);
                           const Scalar dp_da = (pl - pu) / s;
                           const Scalar dp_dd = d > 0 ? dp_da : (d < 0 ? -dp_da : 0.0);
                           if (gx) gx[i] += dbits * dp_dd;
                           if (gm) gm[i] -= dbits * dp_dd;
                           if (gs) gs[i] += dbits * (pl * l - pu * u) / s * sigmoid(sp[i]);
                         }
                       });
}

Var logistic_mixture_bits(const Var& x, const Var& params) {
  const Tensor& v = x.value();
  const Tensor& pr = params.value();
  if (v.rank() != 3 || pr.rank() != 2 || pr.dim(0) != v.channels() || pr.dim(1) % 3 != 0) {
    throw std::invalid_argument("logistic_mixture_bits: params " + describe(pr.extents()) +
                                " incompatible with latent " + describe(v.extents()));
  }
  const int C = v.channels();
  const int K = pr.dim(1) / 3;
  const Eigen::Index plane = static_cast<Eigen::Index>(v.height()) * v.width();
  auto view = [K](const Tensor& p, int c) {
    const Scalar* row = p.data() + static_cast<Eigen::Index>(c) * 3 * K;
    const auto k = static_cast<std::size_t>(K);
    return MixtureView{{row, k}, {row + K, k}, {row + 2 * K, k}};
  };
  Tensor out(v.extents());
  for (int c = 0; c < C; ++c) {
    const MixtureView m = view(pr, c);
    for (Eigen::Index i = c * plane; i < (c + 1) * plane; ++i) {
      const Scalar p = logistic_mixture_mass(v[i], m);
      out[i] = p < kProbabilityFloor ? 16.0 : -std::log(p) / kLn2;
    }
  }
  return x.tape().push(std::move(out), {x, params},
                       [x, params, C, K, plane, view](const Eigen::ArrayXd& g, GradBuffer& grads) {
                         const Tensor& v = x.value();
                         Scalar* gx = x.requires_grad() ? grads.slot(x.id()).data() : nullptr;
                         Scalar* gp = params.requires_grad() ? grads.slot(params.id()).data() : nullptr;
                         for (int c = 0; c < C; ++c) {
                           const MixtureView m = view(params.value(), c);
                           Scalar* gpc = gp ? gp + static_cast<Eigen::Index>(c) * 3 * K : nullptr;
                           for (Eigen::Index i = c * plane; i < (c + 1) * plane; ++i) {
                             const MixtureEval e = evaluate_mixture(v[i], m);
                             if (e.mass < kProbabilityFloor) continue;
                             const Scalar dbits = -g[i] / (e.mass * kLn2);
                             for (int k = 0; k < K; ++k) {
                               const auto kk = static_cast<std::size_t>(k);
                               const Scalar sc = std::exp(m.log_scales[kk]);
                               const Scalar u = (v[i] + 0.5 - m.locations[kk]) / sc;
                               const Scalar l = (v[i] - 0.5 - m.locations[kk]) / sc;
                               const Scalar su = logistic_slope(u), sl = logistic_slope(l);
                               const Scalar dpk_dv = (su - sl) / sc;
                               const Scalar w = e.weights[kk];
                               if (gx) gx[i] += dbits * w * dpk_dv;
                               if (gpc) {
                                 gpc[k] += dbits * w * (e.comp_mass[kk] - e.mass);
                                 gpc[K + k] -= dbits * w * dpk_dv;
                                 gpc[2 * K + k] += dbits * w * (sl * l - su * u);
                               }
                             }
                           }
                         }
                       });
}

}  // namespace flowcodec::grad
