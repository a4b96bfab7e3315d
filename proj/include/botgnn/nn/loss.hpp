#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "botgnn/errors.hpp"
#include "botgnn/tensor.hpp"

namespace botgnn::nn {

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  double operator[](std::uint8_t label) const { return label ? positive : negative; }
};

struct LossResult {
  double loss = 0.0;
  Tensor2 grad;  // d loss / d logits
};

// Row-wise softmax, stabilized by subtracting the row max.
inline Tensor2 softmax(const Tensor2& logits) {
  Tensor2 p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto out = p.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) sum += out[c] = std::exp(in[c] - mx);
    for (double& v : out) v /= sum;
  }
  return p;
}

// Mean over nodes of w[y_i] * -log softmax(logits_i)[y_i].
inline LossResult softmax_cross_entropy(const Tensor2& logits,
                                        std::span<const std::uint8_t> labels,
                                        ClassWeights weights = {}) {
  if (labels.size() != logits.rows()) {
    throw InputError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(logits.rows()) + " rows");
  }
  if (logits.cols() < 2) throw InputError("softmax_cross_entropy: need >= 2 classes");
  LossResult r;
  r.grad = Tensor2(logits.rows(), logits.cols());
  const double inv_n = logits.rows() ? 1.0 / static_cast<double>(logits.rows()) : 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto g = r.grad.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) sum += std::exp(in[c] - mx);
    const double log_sum = std::log(sum);
    const std::uint8_t y = labels[i] ? 1 : 0;
    const double w = weights[y];
    r.loss += w * (log_sum - (in[y] - mx));
    for (std::size_t c = 0; c < in.size(); ++c) {
      const double p = std::exp(in[c] - mx - log_sum);
      g[c] = w * inv_n * (p - (c == y ? 1.0 : 0.0));
    }
  }
  r.loss *= inv_n;
  return r;
}

}  // namespace botgnn::nn
