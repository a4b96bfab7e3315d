#pragma once

#include <cmath>
#include <span>

#include "botgnn/nn/param.hpp"

namespace botgnn::nn {

struct AdamConfig {
  double lr = 0.005;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam with L2 weight decay folded into the gradient.
// Gradients are zeroed afterwards.
inline void adam_step(std::span<ParamTensor* const> params, const AdamConfig& cfg) {
  for (ParamTensor* p : params) {
    ++p->step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
    auto value = p->value.values();
    auto grad = p->grad.values();
    auto m = p->first_moment.values();
    auto v = p->second_moment.values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i] + cfg.weight_decay * value[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
    p->zero_grad();
  }
}

}  // namespace botgnn::nn
