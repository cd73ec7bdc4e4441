// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace flowcodec::grad {

namespace {

struct Tap {
  int lo, hi;
  Scalar w_hi;
};

// Source taps for 2x bilinear upsampling along one axis, half-pixel centers.
std::vector<Tap> upsample_taps(int n) {
  std::vector<Tap> taps(static_cast<std::size_t>(2 * n));
  for (int o = 0; o < 2 * n; ++o) {
    const Scalar src = std::clamp((o + 0.5) * 0.5 - 0.5, 0.0, static_cast<Scalar>(n - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, n - 1);
    taps[static_cast<std::size_t>(o)] = {lo, hi, src - lo};
  }
  return taps;
}

void require_rank3(const Tensor& t, const char* op) {
  if (t.rank() != 3) throw std::invalid_argument(std::string(op) + ": expected (C,H,W), got " + describe(t.extents()));
}

}  // namespace

Var upsample2x(const Var& x) {
  const Tensor& in = x.value();
  require_rank3(in, "upsample2x");
  const int C = in.channels(), H = in.height(), W = in.width();
  auto ty = upsample_taps(H);
  auto tx = upsample_taps(W);
  Tensor out({C, 2 * H, 2 * W});
  for (int c = 0; c < C; ++c) {
    for (int oy = 0; oy < 2 * H; ++oy) {
      const Tap& a = ty[static_cast<std::size_t>(oy)];
      for (int ox = 0; ox < 2 * W; ++ox) {
        const Tap& b = tx[static_cast<std::size_t>(ox)];
        const Scalar top = in.at(c, a.lo, b.lo) * (1.0 - b.w_hi) + in.at(c, a.lo, b.hi) * b.w_hi;
        const Scalar bot = in.at(c, a.hi, b.lo) * (1.0 - b.w_hi) + in.at(c, a.hi, b.hi) * b.w_hi;
        out.at(c, oy, ox) = top * (1.0 - a.w_hi) + bot * a.w_hi;
      }
    }
  }
  return x.tape().push(std::move(out), {x}, [x, C, H, W, ty, tx](const Eigen::ArrayXd& g, GradBuffer& grads) {
    auto& gx = grads.slot(x.id());
    const int OW = 2 * W;
    for (int c = 0; c < C; ++c) {
      for (int oy = 0; oy < 2 * H; ++oy) {
        const Tap& a = ty[static_cast<std::size_t>(oy)];
        for (int ox = 0; ox < OW; ++ox) {
          const Tap& b = tx[static_cast<std::size_t>(ox)];
          const Scalar go = g[(static_cast<Eigen::Index>(c) * 2 * H + oy) * OW + ox];
          const Eigen::Index base = static_cast<Eigen::Index>(c) * H;
          gx[(base + a.lo) * W + b.lo] += go * (1.0 - a.w_hi) * (1.0 - b.w_hi);
          gx[(base + a.lo) * W + b.hi] += go * (1.0 - a.w_hi) * b.w_hi;
          gx[(base + a.hi) * W + b.lo] += go * a.w_hi * (1.0 - b.w_hi);
          gx[(base + a.hi) * W + b.hi] += go * a.w_hi * b.w_hi;
        }
      }
    }
  });
}

Var avgpool2x(const Var& x) {
  const Tensor& in = x.value();
  require_rank3(in, "avgpool2x");
  const int C = in.channels(), H = in.height(), W = in.width();
  if (H % 2 || W % 2) throw std::invalid_argument("avgpool2x: extents must be even, got " + describe(in.extents()));
  Tensor out({C, H / 2, W / 2});
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < H / 2; ++y)
      for (int xx = 0; xx < W / 2; ++xx)
        out.at(c, y, xx) = 0.25 * (in.at(c, 2 * y, 2 * xx) + in.at(c, 2 * y, 2 * xx + 1) +
                                   in.at(c, 2 * y + 1, 2 * xx) + in.at(c, 2 * y + 1, 2 * xx + 1));
  return x.tape().push(std::move(out), {x}, [x, C, H, W](const Eigen::ArrayXd& g, GradBuffer& grads) {
    auto& gx = grads.slot(x.id());
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < H; ++y)
        for (int xx = 0; xx < W; ++xx)
          gx[(static_cast<Eigen::Index>(c) * H + y) * W + xx] +=
              0.25 * g[(static_cast<Eigen::Index>(c) * (H / 2) + y / 2) * (W / 2) + xx / 2];
  });
}

namespace {

struct Sample {
  int x0, x1, y0, y1;
  Scalar wx, wy;
  bool clamped_x, clamped_y;
};

Sample locate(Scalar px, Scalar py, int H, int W) {
  Sample s{};
  const Scalar cx = std::clamp(px, 0.0, static_cast<Scalar>(W - 1));
  const Scalar cy = std::clamp(py, 0.0, static_cast<Scalar>(H - 1));
  s.clamped_x = cx != px;
  s.clamped_y = cy != py;
  s.x0 = static_cast<int>(std::floor(cx));
  s.y0 = static_cast<int>(std::floor(cy));
  s.x1 = std::min(s.x0 + 1, W - 1);
  s.y1 = std::min(s.y0 + 1, H - 1);
  s.wx = cx - s.x0;
  s.wy = cy - s.y0;
  return s;
}

}  // namespace

Var grid_sample(const Var& image, const Var& flow) {
  const Tensor& img = image.value();
  const Tensor& fl = flow.value();
  require_rank3(img, "grid_sample");
  require_rank3(fl, "grid_sample");
  if (fl.channels() != 2 || fl.height() != img.height() || fl.width() != img.width()) {
    throw std::invalid_argument("grid_sample: flow " + describe(fl.extents()) + " does not match image " +
                                describe(img.extents()));
  }
  const int C = img.channels(), H = img.height(), W = img.width();
  Tensor out({C, H, W});
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Sample s = locate(x + fl.at(0, y, x), y + fl.at(1, y, x), H, W);
      for (int c = 0; c < C; ++c) {
        const Scalar top = img.at(c, s.y0, s.x0) * (1.0 - s.wx) + img.at(c, s.y0, s.x1) * s.wx;
        const Scalar bot = img.at(c, s.y1, s.x0) * (1.0 - s.wx) + img.at(c, s.y1, s.x1) * s.wx;
        out.at(c, y, x) = top * (1.0 - s.wy) + bot * s.wy;
      }
    }
  }
  return image.tape().push(std::move(out), {image, flow}, [image, flow, C, H, W](const Eigen::ArrayXd& g, GradBuffer& grads) {
    const Tensor& img = image.value();
    const Tensor& fl = flow.value();
    Scalar* gi = image.requires_grad() ? grads.slot(image.id()).data() : nullptr;
    Scalar* gf = flow.requires_grad() ? grads.slot(flow.id()).data() : nullptr;
    const Eigen::Index plane = static_cast<Eigen::Index>(H) * W;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const Sample s = locate(x + fl.at(0, y, x), y + fl.at(1, y, x), H, W);
        Scalar dfx = 0.0, dfy = 0.0;
        for (int c = 0; c < C; ++c) {
          const Scalar go = g[c * plane + static_cast<Eigen::Index>(y) * W + x];
          const Scalar v00 = img.at(c, s.y0, s.x0), v01 = img.at(c, s.y0, s.x1);
          const Scalar v10 = img.at(c, s.y1, s.x0), v11 = img.at(c, s.y1, s.x1);
          if (gi) {
            const Eigen::Index base = c * plane;
            gi[base + static_cast<Eigen::Index>(s.y0) * W + s.x0] += go * (1.0 - s.wx) * (1.0 - s.wy);
            gi[base + static_cast<Eigen::Index>(s.y0) * W + s.x1] += go * s.wx * (1.0 - s.wy);
            gi[base + static_cast<Eigen::Index>(s.y1) * W + s.x0] += go * (1.0 - s.wx) * s.wy;
            gi[base + static_cast<Eigen::Index>(s.y1) * W + s.x1] += go * s.wx * s.wy;
          }
          dfx += go * ((v01 - v00) * (1.0 - s.wy) + (v11 - v10) * s.wy);
          dfy += go * ((v10 - v00) * (1.0 - s.wx) + (v11 - v01) * s.wx);
        }
        if (gf) {
          if (!s.clamped_x) gf[static_cast<Eigen::Index>(y) * W + x] += dfx;
          if (!s.clamped_y) gf[plane + static_cast<Eigen::Index>(y) * W + x] += dfy;
        }
      }
    }
  });
}

}  // namespace flowcodec::grad
