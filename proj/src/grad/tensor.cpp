// SPDX-License-Identifier: Apache-2.0
#include "flowcodec/grad/tensor.hpp"

#include <cstring>
#include <sstream>
#include <stdexcept>

namespace flowcodec::grad {

std::string describe(const Extents& extents) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < extents.size(); ++i) {
    if (i) os << 'x';
    os << extents[i];
  }
  os << ']';
  return os.str();
}

std::int64_t element_count(const Extents& extents) {
  std::int64_t n = 1;
  for (int e : extents) {
    if (e <= 0) throw std::invalid_argument("non-positive extent in " + describe(extents));
    n *= e;
  }
  return n;
}

Tensor::Tensor(Extents extents) : Tensor(std::move(extents), 0.0) {}

Tensor::Tensor(Extents extents, Scalar fill)
    : extents_(std::move(extents)), values_(Eigen::ArrayXd::Constant(element_count(extents_), fill)) {}

Tensor::Tensor(Extents extents, Eigen::ArrayXd values) : extents_(std::move(extents)), values_(std::move(values)) {
  if (element_count(extents_) != values_.size()) {
    throw std::invalid_argument("tensor " + describe(extents_) + " given " + std::to_string(values_.size()) +
                                " values");
  }
}

Scalar Tensor::item() const {
  if (values_.size() != 1) throw std::invalid_argument("item() on tensor " + describe(extents_));
  return values_[0];
}

bool Tensor::bit_equal(const Tensor& other) const {
  return extents_ == other.extents_ &&
         std::memcmp(values_.data(), other.values_.data(), sizeof(Scalar) * static_cast<std::size_t>(size())) == 0;
}

void require_same_extents(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_extents(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + describe(a.extents()) + " vs " +
                                describe(b.extents()));
  }
}

}  // namespace flowcodec::grad
