#ifndef ASCNET_TENSOR_HPP_
#define ASCNET_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ascnet/errors.hpp"

namespace ascnet {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

/**
 * Dense row-major array with an optional gradient buffer. float32 for
 * training, float64 for gradient checks.
 *
 * The gradient buffer is allocated lazily (see ensure_grad) and is only
 * written by Graph::backward for tensors registered as parameters with
 * requires_grad set.
 */
template <typename T>
struct BasicTensor {
  using value_type = T;

  Shape shape;
  std::vector<T> values;
  std::vector<T> grad;
  bool requires_grad = false;

  BasicTensor() = default;

  explicit BasicTensor(Shape s, T fill = T(0), bool needs_grad = false)
      : shape(std::move(s)), values(shape_size(shape), fill), requires_grad(needs_grad) {
    check_shape();
  }

  BasicTensor(Shape s, std::vector<T> v, bool needs_grad = false)
      : shape(std::move(s)), values(std::move(v)), requires_grad(needs_grad) {
    if (shape_size(shape) != values.size())
      throw ShapeError("shape " + shape_str(shape) + " does not hold " + std::to_string(values.size()) +
                       " values");
    check_shape();
  }

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  T& operator[](std::size_t i) { return values[i]; }
  T operator[](std::size_t i) const { return values[i]; }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), T(0));
  }
  void zero_grad() { grad.assign(values.size(), T(0)); }

 private:
  void check_shape() const {
    for (std::size_t d : shape)
      if (d == 0) throw ShapeError("zero-sized dimension in " + shape_str(shape));
  }
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

/// Element-wise precision conversion; grads are not carried over.
template <typename To, typename From>
BasicTensor<To> tensor_cast(const BasicTensor<From>& t) {
  return BasicTensor<To>(t.shape, std::vector<To>(t.values.begin(), t.values.end()), t.requires_grad);
}

}  // namespace ascnet

#endif  // ASCNET_TENSOR_HPP_
