#pragma once

#include <cstdint>
#include <vector>

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/random.hpp"
#include "botgnn/topo/generators.hpp"

namespace botgnn::topo {

struct GraphMeta {
  TopologyKind topology = TopologyKind::kNone;
  std::uint64_t seed = 0;
  std::size_t bot_count = 0;
  friend bool operator==(const GraphMeta&, const GraphMeta&) = default;
};

// Graph with one bit per node, 1 = botnet member.
struct LabeledGraph {
  Graph graph;
  std::vector<std::uint8_t> labels;
  GraphMeta meta;

  std::vector<NodeId> bot_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < labels.size(); ++i) {
      if (labels[i]) out.push_back(i);
    }
    return out;
  }

  void validate() const {
    if (labels.size() != graph.n()) {
      throw InputError("label count " + std::to_string(labels.size()) +
                       " != node count " + std::to_string(graph.n()));
    }
    std::size_t bots = 0;
    for (auto l : labels) bots += l ? 1 : 0;
    if (bots != meta.bot_count) {
      throw InputError("labeled bots " + std::to_string(bots) + " != bot_count " +
                       std::to_string(meta.bot_count));
    }
  }

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

// Embeds a botnet with `bot_count` nodes (edges over [0, bot_count)) into
// the background: bot i lands on the i-th of bot_count distinct background
// nodes drawn uniformly, and edges are unioned with deduplication.
inline LabeledGraph overlay(const Graph& background, const EdgeList& botnet_edges,
                            std::uint32_t bot_count, std::uint64_t seed,
                            TopologyKind kind = TopologyKind::kNone) {
  if (bot_count > background.n()) {
    throw InputError("overlay: " + std::to_string(bot_count) + " bots exceed " +
                     std::to_string(background.n()) + " background nodes");
  }
  for (const auto& e : botnet_edges) {
    if (e.u >= bot_count || e.v >= bot_count) {
      throw InputError("overlay: botnet edge references node outside [0, bot_count)");
    }
  }
  Rng rng(seed);
  const auto hosts = sample_without_replacement(static_cast<std::uint32_t>(background.n()),
                                                bot_count, rng);
  EdgeList edges = background.edges();
  edges.reserve(edges.size() + botnet_edges.size());
  for (const auto& e : botnet_edges) edges.push_back({hosts[e.u], hosts[e.v]});

  LabeledGraph out;
  out.graph = Graph::from_edges(edges, background.n());
  out.labels.assign(background.n(), 0);
  for (auto h : hosts) out.labels[h] = 1;
  out.meta = {kind, seed, bot_count};
  return out;
}

}  // namespace botgnn::topo
