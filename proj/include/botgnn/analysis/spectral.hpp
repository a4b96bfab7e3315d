#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/random.hpp"

namespace botgnn::analysis {

enum class Lambda2Mode {
  kSigned,    // second-largest eigenvalue
  kAbsolute,  // largest |eigenvalue| other than the top one
};

struct Lambda2Options {
  double tol = 1e-8;
  std::size_t max_iters = 500000;
  Lambda2Mode mode = Lambda2Mode::kSigned;
  std::uint64_t seed = 0;
};

struct Lambda2Result {
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t component_count = 1;
  bool largest_component_only = false;  // input was disconnected
  bool bipartite = false;
};

inline bool is_bipartite(const Graph& g) {
  std::vector<int> color(g.n(), -1);
  std::vector<NodeId> queue;
  for (NodeId s = 0; s < g.n(); ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    queue.assign(1, s);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const NodeId u = queue[h];
      for (NodeId v : g.neighbors(u)) {
        if (color[v] < 0) {
          color[v] = 1 - color[u];
          queue.push_back(v);
        } else if (color[v] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

namespace detail {

// Power iteration for the top eigenvalue of (I + sign * N) / 2 restricted to
// the complement of `top`, where N = D^-1/2 A D^-1/2. Shifting maps the
// spectrum of N from [-1, 1] into [0, 1] so the wanted end dominates.
// Returns the corresponding eigenvalue of N.
inline double deflated_power_iteration(const Graph& g, const std::vector<double>& inv_sqrt_deg,
                                       const std::vector<double>& top, double sign,
                                       const Lambda2Options& opt, std::size_t& iterations) {
  const std::size_t n = g.n();
  auto deflate_normalize = [&](std::vector<double>& v) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * top[i];
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] -= dot * top[i];
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (double& x : v) x /= norm;
    return true;
  };
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (NodeId i = 0; i < n; ++i) {
      double s = 0.0;
      for (NodeId j : g.neighbors(i)) s += inv_sqrt_deg[j] * v[j];
      out[i] = 0.5 * (v[i] + sign * inv_sqrt_deg[i] * s);
    }
  };

  Rng rng(opt.seed);
  std::vector<double> v(n), w(n);
  for (double& x : v) x = uniform_real(rng, -1.0, 1.0);
  if (!deflate_normalize(v)) throw NumericError("lambda2: degenerate start vector");

  // The shifted operator is positive semidefinite, so the quotients rise
  // monotonically and geometrically. Their ratio q gives the remaining error
  // as about delta * q / (1 - q); a plain small delta is not enough when the
  // next eigenvalue is close.
  double previous = std::numeric_limits<double>::infinity();
  double previous_delta = std::numeric_limits<double>::infinity();
  for (iterations = 1; iterations <= opt.max_iters; ++iterations) {
    apply(v, w);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += v[i] * w[i];
    const double delta = std::abs(mu - previous);
    if (delta < opt.tol) {
      const double q = delta / previous_delta;
      if (delta == 0.0 || (q < 1.0 && 2.0 * delta * q / (1.0 - q) < opt.tol)) {
        return sign * (2.0 * mu - 1.0);
      }
    }
    previous = mu;
    previous_delta = delta;
    v.swap(w);
    // The whole remaining spectrum sits at 0 after the shift; v is then
    // already an eigenvector of the deflated operator.
    if (!deflate_normalize(v)) return sign * (2.0 * mu - 1.0);
  }
  throw NumericError("lambda2: no convergence after " + std::to_string(opt.max_iters) +
                     " iterations");
}

}  // namespace detail

// Second-largest eigenvalue of the walk matrix P = D^-1 A, computed on the
// similar symmetric matrix N = D^-1/2 A D^-1/2 with the top eigenvector
// D^1/2 1 projected out each iteration. Converges when successive Rayleigh
// quotients differ by less than `tol` and the extrapolated remaining error
// is below `tol` as well. Disconnected graphs are analyzed on
// their largest component and flagged. The graph is used as given: callers
// decide whether self-loops belong in it.
inline Lambda2Result lambda2(const Graph& input, const Lambda2Options& opt = {}) {
  Lambda2Result r;
  const auto nodes = largest_component(input, &r.component_count);
  r.largest_component_only = r.component_count > 1;
  const Graph g = r.largest_component_only ? induced_subgraph(input, nodes) : input;
  if (g.n() < 2) throw InputError("lambda2: needs a component with at least 2 nodes");
  r.bipartite = is_bipartite(g);

  std::vector<double> inv_sqrt(g.n()), top(g.n());
  double norm = 0.0;
  for (NodeId i = 0; i < g.n(); ++i) {
    const auto d = static_cast<double>(g.degree(i));
    inv_sqrt[i] = 1.0 / std::sqrt(d);
    top[i] = std::sqrt(d);
    norm += d;
  }
  norm = std::sqrt(norm);
  for (double& x : top) x /= norm;

  std::size_t iters = 0;
  r.value = detail::deflated_power_iteration(g, inv_sqrt, top, +1.0, opt, iters);
  r.iterations = iters;
  if (opt.mode == Lambda2Mode::kAbsolute) {
    const double smallest = detail::deflated_power_iteration(g, inv_sqrt, top, -1.0, opt, iters);
    r.iterations += iters;
    r.value = std::max(std::abs(r.value), std::abs(smallest));
  }
  return r;
}

}  // namespace botgnn::analysis
