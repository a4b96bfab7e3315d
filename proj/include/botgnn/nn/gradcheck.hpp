#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "botgnn/nn/param.hpp"
#include "botgnn/random.hpp"

namespace botgnn::nn {

struct GradcheckOptions {
  double eps = 1e-6;
  std::size_t samples = 200;  // coordinates; all of them if fewer exist
  // Denominator floor: |a - f| / max(|a|, |f|, floor). Keeps the ratio
  // meaningful for coordinates whose gradient is at finite-difference noise.
  double floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  // Values at the coordinate with the largest relative error.
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares analytic gradients against central differences.
//
// `objective(true)` must return the loss and accumulate analytic gradients
// into the parameters' grad tensors; `objective(false)` only returns the
// loss. Parameter values are restored on return.
inline GradcheckResult gradcheck(const std::function<double(bool)>& objective,
                                 std::span<ParamTensor* const> params,
                                 const GradcheckOptions& opt = {}) {
  for (ParamTensor* p : params) p->zero_grad();
  objective(true);

  struct Coord {
    ParamTensor* param;
    std::size_t index;
  };
  std::vector<Coord> coords;
  for (ParamTensor* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) coords.push_back({p, i});
  }
  if (coords.size() > opt.samples) {
    Rng rng(opt.seed);
    shuffle(std::span<Coord>(coords), rng);
    coords.resize(opt.samples);
  }

  GradcheckResult result;
  for (const auto& [param, i] : coords) {
    double& x = param->value.values()[i];
    const double saved = x;
    const double hi = saved + opt.eps;
    const double lo = saved - opt.eps;
    x = hi;
    const double up = objective(false);
    x = lo;
    const double down = objective(false);
    x = saved;
    // Divide by the step actually taken, not the nominal 2*eps.
    const double numeric = (up - down) / (hi - lo);
    const double analytic = param->grad.values()[i];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), opt.floor});
    if (const double rel = std::abs(analytic - numeric) / denom; rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
    ++result.coords_checked;
  }
  for (ParamTensor* p : params) p->zero_grad();
  return result;
}

}  // namespace botgnn::nn
