#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "botgnn/analysis/paths.hpp"
#include "botgnn/analysis/spectral.hpp"
#include "botgnn/errors.hpp"
#include "botgnn/topo/labeled_graph.hpp"

namespace botgnn::analysis {

struct TopologyReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t component_count = 0;
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double avg_path_length = std::numeric_limits<double>::quiet_NaN();
  bool largest_component_only = false;
  bool bipartite = false;
  bool path_length_sampled = false;
  bool degenerate = false;  // no edges, nothing to measure
};

struct TopologyOptions {
  Lambda2Options spectral{};
  PathLengthOptions paths{};
};

inline TopologyReport analyze_topology(const Graph& g, const TopologyOptions& opt = {}) {
  TopologyReport r;
  r.n = g.n();
  r.m = g.m();
  connected_components(g, &r.component_count);
  if (g.m() == g.self_loop_count()) {
    r.degenerate = true;
    return r;
  }
  const auto l2 = lambda2(g, opt.spectral);
  r.lambda2 = l2.value;
  r.bipartite = l2.bipartite;
  r.largest_component_only = l2.largest_component_only;
  const auto apl = avg_path_length(g, opt.paths);
  r.avg_path_length = apl.value;
  r.path_length_sampled = apl.sampled;
  return r;
}

// Diagnostics of the botnet's induced subgraph next to those of the whole
// graph, so the faster mixing of the botnet can be compared directly.
struct MixingSummary {
  TopologyReport botnet;
  TopologyReport full;
};

inline MixingSummary mixing_summary(const topo::LabeledGraph& lg, const TopologyOptions& opt = {}) {
  lg.validate();
  if (lg.meta.bot_count < 2) throw InputError("mixing_summary: needs at least 2 bot nodes");
  const auto bots = lg.bot_nodes();
  MixingSummary s;
  s.botnet = analyze_topology(induced_subgraph(lg.graph, bots), opt);
  s.full = analyze_topology(lg.graph, opt);
  return s;
}

inline std::string to_key_value(const TopologyReport& r, const std::string& prefix = "") {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::string s;
  s += prefix + "n=" + std::to_string(r.n) + "\n";
  s += prefix + "m=" + std::to_string(r.m) + "\n";
  s += prefix + "components=" + std::to_string(r.component_count) + "\n";
  s += prefix + "lambda2=" + num(r.lambda2) + "\n";
  s += prefix + "avg_path_length=" + num(r.avg_path_length) + "\n";
  s += prefix + "largest_component_only=" + (r.largest_component_only ? "1" : "0") + "\n";
  s += prefix + "bipartite=" + (r.bipartite ? "1" : "0") + "\n";
  s += prefix + "path_length_sampled=" + (r.path_length_sampled ? "1" : "0") + "\n";
  s += prefix + "degenerate=" + (r.degenerate ? "1" : "0") + "\n";
  return s;
}

}  // namespace botgnn::analysis
