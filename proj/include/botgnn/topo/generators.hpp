#pragma once

// Botnet overlay topologies and the synthetic background graph. Every
// generator is a pure function of its arguments: same inputs, same
// canonical edge list.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/random.hpp"

namespace botgnn::topo {

enum class TopologyKind { kDeBruijn, kChord, kKademlia, kLeetChord, kNone };

inline std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kDeBruijn: return "debruijn";
    case TopologyKind::kChord: return "chord";
    case TopologyKind::kKademlia: return "kademlia";
    case TopologyKind::kLeetChord: return "leet-chord";
    case TopologyKind::kNone: return "none";
  }
  return "none";
}

inline constexpr std::string_view kTopologyNames = "debruijn, chord, kademlia, leet-chord";

inline TopologyKind parse_topology(std::string_view s) {
  if (s == "debruijn") return TopologyKind::kDeBruijn;
  if (s == "chord") return TopologyKind::kChord;
  if (s == "kademlia") return TopologyKind::kKademlia;
  if (s == "leet-chord") return TopologyKind::kLeetChord;
  if (s == "none") return TopologyKind::kNone;
  throw ConfigError("unknown topology '" + std::string(s) + "' (expected one of " +
                    std::string(kTopologyNames) + ")");
}

// Undirected closure of a set of arcs, self-arcs dropped.
inline EdgeList symmetrize(const EdgeList& arcs) {
  EdgeList out;
  out.reserve(arcs.size());
  for (const auto& a : arcs) {
    if (a.u != a.v) out.push_back(a);
  }
  return canonical_edges(std::move(out));
}

// Koorde-style de Bruijn graph: arcs x -> (degree*x + i) mod n for
// i in [0, degree). degree=2 is the binary graph.
inline EdgeList gen_debruijn(std::uint32_t n, std::uint32_t degree = 2) {
  if (n < 2) throw InputError("gen_debruijn: n must be >= 2");
  if (degree < 2) throw InputError("gen_debruijn: degree must be >= 2");
  EdgeList arcs;
  arcs.reserve(static_cast<std::size_t>(n) * degree);
  for (std::uint64_t x = 0; x < n; ++x) {
    for (std::uint64_t i = 0; i < degree; ++i) {
      arcs.push_back({static_cast<NodeId>(x), static_cast<NodeId>((degree * x + i) % n)});
    }
  }
  return symmetrize(arcs);
}

// Chord ring with fingers i -> i + 2^j for j = 1 .. ceil(log2 n) - 1.
inline EdgeList gen_chord(std::uint32_t n) {
  if (n < 2) throw InputError("gen_chord: n must be >= 2");
  const int bits = std::bit_width(n - 1u);  // ceil(log2 n)
  EdgeList arcs;
  for (std::uint64_t i = 0; i < n; ++i) {
    arcs.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
    for (int j = 1; j < bits; ++j) {
      arcs.push_back({static_cast<NodeId>(i),
                      static_cast<NodeId>((i + (std::uint64_t{1} << j)) % n)});
    }
  }
  return symmetrize(arcs);
}

// Kademlia routing tables. Node ids are distinct random b-bit values,
// b = ceil(log2 n) + 1. Bucket i of a node holds peers at XOR distance in
// [2^i, 2^(i+1)); the node links to up to `bucket_size` of them, sampled
// uniformly.
inline EdgeList gen_kademlia(std::uint32_t n, std::uint32_t bucket_size,
                             std::uint64_t seed) {
  if (n < 2) throw InputError("gen_kademlia: n must be >= 2");
  if (bucket_size < 1) throw InputError("gen_kademlia: bucket size must be >= 1");
  const int bits = std::bit_width(n - 1u) + 1;
  Rng rng(seed);
  const auto id_space = std::uint32_t{1} << bits;
  const std::vector<std::uint32_t> ids = sample_without_replacement(id_space, n, rng);

  EdgeList arcs;
  std::vector<std::vector<NodeId>> buckets(static_cast<std::size_t>(bits));
  for (NodeId a = 0; a < n; ++a) {
    for (auto& b : buckets) b.clear();
    for (NodeId b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::uint32_t dist = ids[a] ^ ids[b];
      buckets[static_cast<std::size_t>(std::bit_width(dist) - 1)].push_back(b);
    }
    for (auto& bucket : buckets) {
      const auto take = std::min<std::size_t>(bucket_size, bucket.size());
      for (std::size_t t = 0; t < take; ++t) {
        std::swap(bucket[t], bucket[t + uniform_index(rng, bucket.size() - t)]);
        arcs.push_back({a, bucket[t]});
      }
    }
  }
  return symmetrize(arcs);
}

// Ring plus one long-range finger per node. The finger's ring distance d is
// drawn with probability proportional to 1/d over [2, n/2], direction
// uniform. This is a small-world approximation of LEET-Chord.
inline EdgeList gen_leet_chord(std::uint32_t n, std::uint64_t seed) {
  if (n < 3) throw InputError("gen_leet_chord: n must be >= 3");
  EdgeList arcs;
  for (std::uint64_t i = 0; i < n; ++i) {
    arcs.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
  }
  const std::uint32_t max_dist = n / 2;
  if (max_dist >= 2) {
    std::vector<double> cumulative;
    cumulative.reserve(max_dist - 1);
    double total = 0.0;
    for (std::uint32_t d = 2; d <= max_dist; ++d) {
      total += 1.0 / d;
      cumulative.push_back(total);
    }
    Rng rng(seed);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double r = uniform_unit(rng) * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      if (it == cumulative.end()) --it;
      const std::uint64_t d = 2 + static_cast<std::uint64_t>(it - cumulative.begin());
      const bool forward = (rng() >> 63) != 0;
      const std::uint64_t target = forward ? (i + d) % n : (i + n - d) % n;
      arcs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(target)});
    }
  }
  return symmetrize(arcs);
}

// Preferential attachment: a clique on links+1 seed nodes, then each new
// node attaches to `links` = floor(avg_degree/2) distinct existing nodes
// chosen with probability proportional to degree.
inline EdgeList gen_background(std::uint32_t n, double avg_degree, std::uint64_t seed) {
  if (n < 10) throw InputError("gen_background: n must be >= 10");
  if (!(avg_degree >= 2)) throw InputError("gen_background: avg_degree must be >= 2");
  const auto links = static_cast<std::uint32_t>(avg_degree / 2);
  const std::uint32_t seed_nodes = std::min(links + 1, n);

  EdgeList edges;
  // Each endpoint appears once per incident edge: sampling an entry uniformly
  // is sampling a node proportionally to its degree.
  std::vector<NodeId> endpoints;
  edges.reserve(static_cast<std::size_t>(n) * links);
  endpoints.reserve(static_cast<std::size_t>(n) * links * 2);
  for (NodeId u = 0; u < seed_nodes; ++u) {
    for (NodeId v = u + 1; v < seed_nodes; ++v) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  Rng rng(seed);
  std::vector<NodeId> targets;
  for (NodeId u = seed_nodes; u < n; ++u) {
    targets.clear();
    while (targets.size() < links) {
      const NodeId t = endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
        targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      edges.push_back({t, u});
      endpoints.push_back(t);
      endpoints.push_back(u);
    }
  }
  return canonical_edges(std::move(edges));
}

struct BotnetParams {
  std::uint32_t debruijn_degree = 2;
  std::uint32_t kademlia_bucket = 2;
};

inline EdgeList gen_botnet(TopologyKind kind, std::uint32_t n, const BotnetParams& params,
                           std::uint64_t seed) {
  switch (kind) {
    case TopologyKind::kDeBruijn: return gen_debruijn(n, params.debruijn_degree);
    case TopologyKind::kChord: return gen_chord(n);
    case TopologyKind::kKademlia: return gen_kademlia(n, params.kademlia_bucket, seed);
    case TopologyKind::kLeetChord: return gen_leet_chord(n, seed);
    case TopologyKind::kNone: return {};
  }
  return {};
}

}  // namespace botgnn::topo
