// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace flowcodec::grad {

using Scalar = double;
using Extents = std::vector<int>;

std::string describe(const Extents& extents);
std::int64_t element_count(const Extents& extents);

// Dense row-major array. Rank 0 is a scalar; rank 3 is read as (channels, height, width).
class Tensor {
 public:
  Tensor() : Tensor(Extents{}) {}
  explicit Tensor(Extents extents);
  Tensor(Extents extents, Scalar fill);
  Tensor(Extents extents, Eigen::ArrayXd values);

  static Tensor zeros(Extents extents) { return Tensor(std::move(extents), 0.0); }
  static Tensor scalar(Scalar v) { return Tensor(Extents{}, v); }
  static Tensor zeros_like(const Tensor& t) { return zeros(t.extents()); }

  const Extents& extents() const noexcept { return extents_; }
  int rank() const noexcept { return static_cast<int>(extents_.size()); }
  int dim(int axis) const { return extents_.at(static_cast<std::size_t>(axis)); }
  Eigen::Index size() const noexcept { return values_.size(); }

  int channels() const { return dim(0); }
  int height() const { return dim(1); }
  int width() const { return dim(2); }

  Eigen::ArrayXd& values() noexcept { return values_; }
  const Eigen::ArrayXd& values() const noexcept { return values_; }
  Scalar* data() noexcept { return values_.data(); }
  const Scalar* data() const noexcept { return values_.data(); }

  Scalar& operator[](Eigen::Index i) { return values_[i]; }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }

  Scalar& at(int c, int y, int x) { return values_[(static_cast<Eigen::Index>(c) * dim(1) + y) * dim(2) + x]; }
  Scalar at(int c, int y, int x) const {
    return values_[(static_cast<Eigen::Index>(c) * dim(1) + y) * dim(2) + x];
  }

  Scalar item() const;
  bool all_finite() const { return values_.isFinite().all(); }
  bool same_extents(const Tensor& other) const { return extents_ == other.extents_; }
  bool bit_equal(const Tensor& other) const;

 private:
  Extents extents_;
  Eigen::ArrayXd values_;
};

// Throws std::invalid_argument naming both extents when they differ.
void require_same_extents(const Tensor& a, const Tensor& b, const char* op);

}  // namespace flowcodec::grad
