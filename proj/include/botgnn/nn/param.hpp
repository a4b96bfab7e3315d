#pragma once

#include <cmath>
#include <cstdint>

#include "botgnn/random.hpp"
#include "botgnn/tensor.hpp"

namespace botgnn::nn {

// Trainable tensor with its gradient and Adam moments, all shape-equal.
struct ParamTensor {
  Tensor2 value;
  Tensor2 grad;
  Tensor2 first_moment;
  Tensor2 second_moment;
  std::uint64_t step = 0;

  ParamTensor() = default;
  explicit ParamTensor(Tensor2 init)
      : value(std::move(init)),
        grad(value.rows(), value.cols()),
        first_moment(value.rows(), value.cols()),
        second_moment(value.rows(), value.cols()) {}

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }
  void zero_grad() { grad.fill(0.0); }
};

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
inline Tensor2 uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  Tensor2 t(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = uniform_real(rng, -bound, bound);
  return t;
}

}  // namespace botgnn::nn
