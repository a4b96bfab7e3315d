#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "botgnn/graph/graph.hpp"
#include "botgnn/random.hpp"

namespace botgnn::analysis {

struct PathLengthOptions {
  std::size_t sample_size = 1000;
  // Components up to this size are measured exactly from every source.
  std::size_t exact_threshold = 20000;
  std::uint64_t seed = 0;
};

struct PathLengthResult {
  double value = 0.0;
  bool sampled = false;
  std::size_t sources = 0;
  std::size_t component_count = 1;
  bool largest_component_only = false;
};

// Sum of BFS hop distances from `source` to every other reachable node.
inline std::uint64_t bfs_distance_sum(const Graph& g, NodeId source, std::vector<std::int32_t>& dist,
                                      std::vector<NodeId>& queue, std::uint64_t& reached) {
  std::fill(dist.begin(), dist.end(), -1);
  dist[source] = 0;
  queue.assign(1, source);
  std::uint64_t total = 0;
  reached = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const NodeId u = queue[h];
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        total += static_cast<std::uint64_t>(dist[v]);
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return total;
}

// Mean hop distance over ordered pairs of distinct nodes in the largest
// component. Exact from every source for components up to
// `exact_threshold` nodes, else from `sample_size` uniformly drawn sources.
inline PathLengthResult avg_path_length(const Graph& input, const PathLengthOptions& opt = {}) {
  PathLengthResult r;
  const auto nodes = largest_component(input, &r.component_count);
  r.largest_component_only = r.component_count > 1;
  const Graph g = r.largest_component_only ? induced_subgraph(input, nodes) : input;
  if (g.n() < 2) return r;

  std::vector<NodeId> sources;
  if (g.n() <= opt.exact_threshold || opt.sample_size >= g.n()) {
    sources.resize(g.n());
    for (NodeId i = 0; i < g.n(); ++i) sources[i] = i;
  } else {
    Rng rng(opt.seed);
    sources = sample_without_replacement(static_cast<std::uint32_t>(g.n()),
                                         static_cast<std::uint32_t>(opt.sample_size), rng);
    r.sampled = true;
  }
  std::vector<std::int32_t> dist(g.n());
  std::vector<NodeId> queue;
  std::uint64_t total = 0, pairs = 0, reached = 0;
  for (NodeId s : sources) {
    total += bfs_distance_sum(g, s, dist, queue, reached);
    pairs += reached;
  }
  r.sources = sources.size();
  r.value = pairs ? static_cast<double>(total) / static_cast<double>(pairs) : 0.0;
  return r;
}

}  // namespace botgnn::analysis
