#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "botgnn/errors.hpp"

namespace botgnn {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

// Orients every pair as u <= v, sorts, removes duplicates.
inline EdgeList canonical_edges(EdgeList edges) {
  for (auto& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

// Immutable undirected simple graph in compressed adjacency form.
//
// A self-loop (i,i) is stored once in neighbors(i) and adds 1 to degree(i).
// m() counts undirected edges, self-loops included, so the neighbor lists
// hold 2*(m - loops) + loops entries in total.
class Graph {
 public:
  Graph() : offsets_{0} {}

  // Throws InputError naming the first pair with an id outside [0, n).
  static Graph from_edges(std::span<const Edge> edges, std::size_t n) {
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n) {
        throw InputError("edge (" + std::to_string(e.u) + "," +
                         std::to_string(e.v) + ") out of range for n=" +
                         std::to_string(n));
      }
    }
    EdgeList canon = canonical_edges(EdgeList(edges.begin(), edges.end()));

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : canon) {
      ++g.offsets_[e.u + 1];
      if (e.u != e.v) ++g.offsets_[e.v + 1];
      else ++g.self_loops_;
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.neighbors_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : canon) {
      g.neighbors_[cursor[e.u]++] = e.v;
      if (e.u != e.v) g.neighbors_[cursor[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    }
    g.m_ = canon.size();
    return g;
  }

  std::size_t n() const noexcept { return offsets_.size() - 1; }
  std::size_t m() const noexcept { return m_; }
  std::size_t self_loop_count() const noexcept { return self_loops_; }
  bool has_self_loops() const noexcept { return self_loops_ > 0; }
  bool empty() const noexcept { return n() == 0; }

  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], degree(i)};
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool has_self_loop(NodeId i) const { return has_edge(i, i); }

  // Canonical edge list: u <= v, ascending lexicographic.
  EdgeList edges() const {
    EdgeList out;
    out.reserve(m_);
    for (NodeId u = 0; u < n(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u <= v) out.push_back({u, v});
      }
    }
    return out;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(n());
    for (NodeId i = 0; i < n(); ++i) d[i] = degree(i);
    return d;
  }

  // Raw CSR arrays; normalized adjacencies index into the same layout.
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> adjacency() const noexcept { return neighbors_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::size_t m_ = 0;
  std::size_t self_loops_ = 0;
};

// Adds (i,i) to every node lacking one. Idempotent.
inline Graph add_self_loops(const Graph& g) {
  EdgeList edges = g.edges();
  edges.reserve(edges.size() + g.n());
  for (NodeId i = 0; i < g.n(); ++i) {
    if (!g.has_self_loop(i)) edges.push_back({i, i});
  }
  return Graph::from_edges(edges, g.n());
}

// Relabels node u as perm[u]. perm must be a bijection on [0, n).
inline Graph permute(const Graph& g, std::span<const NodeId> perm) {
  if (perm.size() != g.n()) {
    throw InputError("permutation length " + std::to_string(perm.size()) +
                     " != n=" + std::to_string(g.n()));
  }
  std::vector<bool> seen(g.n(), false);
  for (NodeId p : perm) {
    if (p >= g.n() || seen[p]) {
      throw InputError("not a permutation: value " + std::to_string(p));
    }
    seen[p] = true;
  }
  EdgeList edges = g.edges();
  for (auto& e : edges) e = {perm[e.u], perm[e.v]};
  return Graph::from_edges(edges, g.n());
}

// Component id per node (ids assigned in order of smallest member).
inline std::vector<std::uint32_t> connected_components(const Graph& g,
                                                       std::size_t* count = nullptr) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.n(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.n(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == kUnset) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

// Subgraph induced by `nodes`; node nodes[k] becomes k.
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  constexpr auto kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> local(g.n(), kAbsent);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] >= g.n()) throw InputError("induced_subgraph: node out of range");
    local[nodes[k]] = static_cast<NodeId>(k);
  }
  EdgeList edges;
  for (NodeId u : nodes) {
    for (NodeId v : g.neighbors(u)) {
      if (local[v] != kAbsent && u <= v) edges.push_back({local[u], local[v]});
    }
  }
  return Graph::from_edges(edges, nodes.size());
}

// Nodes of the largest connected component, ascending. Ties go to the
// component containing the smallest node id.
inline std::vector<NodeId> largest_component(const Graph& g,
                                             std::size_t* component_count = nullptr) {
  std::size_t count = 0;
  auto comp = connected_components(g, &count);
  if (component_count) *component_count = count;
  if (count == 0) return {};
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> nodes;
  for (NodeId i = 0; i < g.n(); ++i) {
    if (comp[i] == best) nodes.push_back(i);
  }
  return nodes;
}

}  // namespace botgnn
