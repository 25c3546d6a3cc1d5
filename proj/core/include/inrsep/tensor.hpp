#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "inrsep/errors.hpp"

namespace inrsep::ad {

// Dense row-major tensor of doubles. All network weights, activations and
// gradients are carried by this type; 64-bit precision throughout.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;
  bool requires_grad = false;

  Tensor() = default;

  Tensor(std::vector<std::size_t> shape_, std::vector<double> values,
         bool requires_grad_ = false)
      : shape(std::move(shape_)), v(std::move(values)), requires_grad(requires_grad_) {
    if (numel_of(shape) != v.size()) {
      throw ShapeError("Tensor: value count does not match shape");
    }
  }

  static Tensor zeros(std::vector<std::size_t> shape_, bool requires_grad_ = false) {
    const std::size_t n = numel_of(shape_);
    return Tensor(std::move(shape_), std::vector<double>(n, 0.0), requires_grad_);
  }

  static Tensor full(std::vector<std::size_t> shape_, double value) {
    const std::size_t n = numel_of(shape_);
    return Tensor(std::move(shape_), std::vector<double>(n, value));
  }

  static Tensor scalar(double value) { return Tensor({1, 1}, {value}); }

  static std::size_t numel_of(const std::vector<std::size_t>& shape_) {
    std::size_t n = 1;
    for (std::size_t e : shape_) n *= e;
    return shape_.empty() ? 0 : n;
  }

  std::size_t numel() const { return v.size(); }
  std::size_t ndim() const { return shape.size(); }

  // 2-D view helpers; 1-D tensors read as a single column.
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }

  double& at(std::size_t i, std::size_t j) { return v[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * cols() + j]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

}  // namespace inrsep::ad
