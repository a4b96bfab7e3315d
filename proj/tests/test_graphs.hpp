#pragma once

// Small graph fixtures shared by the unit and acceptance tests.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "botgnn/graph/graph.hpp"
#include "botgnn/graph/normalize.hpp"
#include "botgnn/random.hpp"

namespace botgnn {

inline void PrintTo(const Tensor2& t, std::ostream* os) {
  *os << t.shape_string() << " [";
  for (std::size_t i = 0; i < t.size() && i < 12; ++i) *os << (i ? ", " : "") << t.values()[i];
  *os << (t.size() > 12 ? ", ...]" : "]");
}

}  // namespace botgnn

namespace botgnn::testing_graphs {

inline Graph cycle(std::uint32_t n) {
  EdgeList e;
  for (NodeId i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return Graph::from_edges(e, n);
}

inline Graph path(std::uint32_t n) {
  EdgeList e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph::from_edges(e, n);
}

inline Graph complete(std::uint32_t n) {
  EdgeList e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph::from_edges(e, n);
}

inline Graph star(std::uint32_t leaves) {
  EdgeList e;
  for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph::from_edges(e, leaves + 1);
}

// Erdos-Renyi G(n, p).
inline Graph random_graph(std::uint32_t n, double p, std::uint64_t seed, bool loops = false) {
  Rng rng(seed);
  EdgeList e;
  for (NodeId i = 0; i < n; ++i) {
    if (loops && uniform_unit(rng) < 0.5) e.push_back({i, i});
    for (NodeId j = i + 1; j < n; ++j) {
      if (uniform_unit(rng) < p) e.push_back({i, j});
    }
  }
  return Graph::from_edges(e, n);
}

// G(n, p) plus a random spanning tree, so the result is connected.
inline Graph random_connected_graph(std::uint32_t n, double p, std::uint64_t seed) {
  Rng rng(seed ^ 0xabcdefULL);
  EdgeList e = random_graph(n, p, seed).edges();
  for (NodeId i = 1; i < n; ++i) e.push_back({static_cast<NodeId>(uniform_index(rng, i)), i});
  return Graph::from_edges(e, n);
}

inline std::vector<NodeId> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> p(n);
  std::iota(p.begin(), p.end(), 0u);
  Rng rng(seed);
  shuffle(std::span<NodeId>(p), rng);
  return p;
}

inline std::vector<double> column_sums(const NormalizedAdjacency& a) {
  std::vector<double> s(a.n(), 0.0);
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t k = a.offsets()[i]; k < a.offsets()[i + 1]; ++k) {
      s[a.columns()[k]] += a.values()[k];
    }
  }
  return s;
}

}  // namespace botgnn::testing_graphs
