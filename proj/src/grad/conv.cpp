// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/ops.hpp"

#include <stdexcept>
#include <string>

namespace flowcodec::grad {

namespace {

using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

// Geometry of a strided window sweep over an (C, H, W) image producing (OH, OW) positions.
struct Window {
  int channels, height, width;
  int kernel, stride, pad;
  int out_height, out_width;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(channels) * kernel * kernel; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(out_height) * out_width; }
};

void im2col(const Scalar* image, const Window& w, Scalar* cols) {
  const Eigen::Index ncols = w.cols();
  for (int c = 0; c < w.channels; ++c) {
    for (int ky = 0; ky < w.kernel; ++ky) {
      for (int kx = 0; kx < w.kernel; ++kx) {
        Scalar* row = cols + ((static_cast<Eigen::Index>(c) * w.kernel + ky) * w.kernel + kx) * ncols;
        for (int oy = 0; oy < w.out_height; ++oy) {
          const int iy = oy * w.stride - w.pad + ky;
          Scalar* dst = row + static_cast<Eigen::Index>(oy) * w.out_width;
          if (iy < 0 || iy >= w.height) {
            for (int ox = 0; ox < w.out_width; ++ox) dst[ox] = 0.0;
            continue;
          }
          const Scalar* src = image + (static_cast<Eigen::Index>(c) * w.height + iy) * w.width;
          for (int ox = 0; ox < w.out_width; ++ox) {
            const int ix = ox * w.stride - w.pad + kx;
            dst[ox] = (ix >= 0 && ix < w.width) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_accumulate(const Scalar* cols, const Window& w, Scalar* image) {
  const Eigen::Index ncols = w.cols();
  for (int c = 0; c < w.channels; ++c) {
    for (int ky = 0; ky < w.kernel; ++ky) {
      for (int kx = 0; kx < w.kernel; ++kx) {
        const Scalar* row = cols + ((static_cast<Eigen::Index>(c) * w.kernel + ky) * w.kernel + kx) * ncols;
        for (int oy = 0; oy < w.out_height; ++oy) {
          const int iy = oy * w.stride - w.pad + ky;
          if (iy < 0 || iy >= w.height) continue;
          const Scalar* src = row + static_cast<Eigen::Index>(oy) * w.out_width;
          Scalar* dst = image + (static_cast<Eigen::Index>(c) * w.height + iy) * w.width;
          for (int ox = 0; ox < w.out_width; ++ox) {
            const int ix = ox * w.stride - w.pad + kx;
            if (ix >= 0 && ix < w.width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

void check_conv_args(const Tensor& x, const Tensor& weight, const Tensor& bias, int in_axis, int out_axis,
                     int stride, const char* op) {
  if (x.rank() != 3) throw std::invalid_argument(std::string(op) + ": input must be (C,H,W), got " + describe(x.extents()));
  if (weight.rank() != 4 || weight.dim(2) != weight.dim(3)) {
    throw std::invalid_argument(std::string(op) + ": weight must be square 4-D, got " + describe(weight.extents()));
  }
  if (weight.dim(in_axis) != x.channels()) {
    throw std::invalid_argument(std::string(op) + ": weight " + describe(weight.extents()) + " expects " +
                                std::to_string(weight.dim(in_axis)) + " input channels, input is " +
                                describe(x.extents()));
  }
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(out_axis)) {
    throw std::invalid_argument(std::string(op) + ": bias " + describe(bias.extents()) + " does not match weight " +
                                describe(weight.extents()));
  }
  if (stride != 1 && stride != 2) throw std::invalid_argument(std::string(op) + ": stride must be 1 or 2");
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  check_conv_args(in, w, bias.value(), 1, 0, stride, "conv2d");
  const int k = w.dim(2);
  const int out_h = (in.height() + 2 * pad - k) / stride + 1;
  const int out_w = (in.width() + 2 * pad - k) / stride + 1;
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("conv2d: input " + describe(in.extents()) + " too small");
  const Window win{in.channels(), in.height(), in.width(), k, stride, pad, out_h, out_w};
  const int out_c = w.dim(0);

  RowMatrix cols(win.rows(), win.cols());
  im2col(in.data(), win, cols.data());
  Tensor out({out_c, out_h, out_w});
  RowMap y(out.data(), out_c, win.cols());
  y.noalias() = ConstRowMap(w.data(), out_c, win.rows()) * cols;
  y.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.value().data(), out_c);

  return x.tape().push(std::move(out), {x, weight, bias},
                       [x, weight, bias, win, out_c](const Eigen::ArrayXd& g, GradBuffer& grads) {
                         ConstRowMap gy(g.data(), out_c, win.cols());
                         const Tensor& wt = weight.value();
                         if (weight.requires_grad()) {
                           RowMatrix cols(win.rows(), win.cols());
                           im2col(x.value().data(), win, cols.data());
                           RowMap(grads.slot(weight.id()).data(), out_c, win.rows()).noalias() += gy * cols.transpose();
                         }
                         if (bias.requires_grad()) {
                           Eigen::Map<Eigen::VectorXd>(grads.slot(bias.id()).data(), out_c) += gy.rowwise().sum();
                         }
                         if (x.requires_grad()) {
                           RowMatrix dcols(win.rows(), win.cols());
                           dcols.noalias() = ConstRowMap(wt.data(), out_c, win.rows()).transpose() * gy;
                           col2im_accumulate(dcols.data(), win, grads.slot(x.id()).data());
                         }
                       });
}

Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad, int output_pad) {
  const Tensor& in = x.value();
  const Tensor& w = weight.value();
  check_conv_args(in, w, bias.value(), 0, 1, stride, "conv_transpose2d");
  if (output_pad < 0 || output_pad >= stride) throw std::invalid_argument("conv_transpose2d: output_pad must be < stride");
  const int k = w.dim(2);
  const int in_c = in.channels();
  const int out_c = w.dim(1);
  const int out_h = (in.height() - 1) * stride - 2 * pad + k + output_pad;
  const int out_w = (in.width() - 1) * stride - 2 * pad + k + output_pad;
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("conv_transpose2d: input " + describe(in.extents()) + " too small");
  // Adjoint of a strided convolution from (out_c, out_h, out_w) down to (in_c, H, W).
  const Window win{out_c, out_h, out_w, k, stride, pad, in.height(), in.width()};
  if ((out_h + 2 * pad - k) / stride + 1 != in.height()) throw std::invalid_argument("conv_transpose2d: inconsistent geometry");

  RowMatrix dcols(win.rows(), win.cols());
  dcols.noalias() = ConstRowMap(w.data(), in_c, win.rows()).transpose() * ConstRowMap(in.data(), in_c, win.cols());
  Tensor out({out_c, out_h, out_w});
  col2im_accumulate(dcols.data(), win, out.data());
  const Eigen::Index plane = static_cast<Eigen::Index>(out_h) * out_w;
  for (int c = 0; c < out_c; ++c) out.values().segment(c * plane, plane) += bias.value()[c];

  return x.tape().push(std::move(out), {x, weight, bias},
                       [x, weight, bias, win, in_c, out_c, plane](const Eigen::ArrayXd& g, GradBuffer& grads) {
                         RowMatrix cols(win.rows(), win.cols());
                         im2col(g.data(), win, cols.data());
                         if (weight.requires_grad()) {
                           RowMap(grads.slot(weight.id()).data(), in_c, win.rows()).noalias() +=
                               ConstRowMap(x.value().data(), in_c, win.cols()) * cols.transpose();
                         }
                         if (bias.requires_grad()) {
                           auto& gb = grads.slot(bias.id());
                           for (int c = 0; c < out_c; ++c) gb[c] += g.segment(c * plane, plane).sum();
                         }
                         if (x.requires_grad()) {
                           RowMap(grads.slot(x.id()).data(), in_c, win.cols()).noalias() +=
                               ConstRowMap(weight.value().data(), in_c, win.rows()) * cols;
                         }
                       });
}

}  // namespace flowcodec::grad
