#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "botgnn/errors.hpp"
#include "botgnn/random.hpp"
#include "botgnn/topo/generators.hpp"
#include "botgnn/topo/graph_io.hpp"
#include "botgnn/topo/labeled_graph.hpp"

namespace botgnn::topo {

enum class Split : std::size_t { kTrain = 0, kVal = 1, kTest = 2 };
inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

struct SplitCounts {
  std::size_t train = 8;
  std::size_t val = 1;
  std::size_t test = 1;

  std::size_t total() const { return train + val + test; }
  std::size_t operator[](Split s) const {
    return s == Split::kTrain ? train : s == Split::kVal ? val : test;
  }
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

// 8:1:1 with rounding toward train.
inline SplitCounts split_counts(std::size_t total) {
  const std::size_t tenth = total / 10;
  return {total - 2 * tenth, tenth, tenth};
}

struct DatasetConfig {
  TopologyKind topology = TopologyKind::kChord;
  std::uint32_t n_background = 10000;
  double avg_degree = 10.0;
  std::uint32_t bots = 500;
  SplitCounts graphs{};
  std::uint64_t seed = 0;
  std::uint32_t debruijn_degree = 10;
  std::uint32_t kademlia_bucket = 2;
  // When set, every graph uses this edge list as its background instead of
  // a synthetic one.
  std::optional<std::filesystem::path> background_file;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

// Full-size datasets: 960 graphs of ~144k background nodes, 10k bots.
inline DatasetConfig full_preset(TopologyKind kind, std::uint64_t seed) {
  DatasetConfig c;
  c.topology = kind;
  c.n_background = 143895;
  c.avg_degree = 11.5;
  c.bots = 10000;
  c.graphs = split_counts(960);
  c.seed = seed;
  return c;
}

inline nlohmann::ordered_json to_json(const DatasetConfig& c) {
  nlohmann::ordered_json j;
  j["topology"] = std::string(to_string(c.topology));
  j["n_background"] = c.n_background;
  j["avg_degree"] = c.avg_degree;
  j["bots"] = c.bots;
  j["graphs"] = {c.graphs.train, c.graphs.val, c.graphs.test};
  j["seed"] = c.seed;
  j["debruijn_degree"] = c.debruijn_degree;
  j["kademlia_bucket"] = c.kademlia_bucket;
  if (c.background_file) j["background_file"] = c.background_file->string();
  return j;
}

inline DatasetConfig dataset_config_from_json(const nlohmann::ordered_json& j) {
  DatasetConfig c;
  c.topology = parse_topology(j.at("topology").get<std::string>());
  c.n_background = j.at("n_background").get<std::uint32_t>();
  c.avg_degree = j.at("avg_degree").get<double>();
  c.bots = j.at("bots").get<std::uint32_t>();
  const auto& g = j.at("graphs");
  c.graphs = {g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>(), g.at(2).get<std::size_t>()};
  c.seed = j.at("seed").get<std::uint64_t>();
  c.debruijn_degree = j.value("debruijn_degree", 10u);
  c.kademlia_bucket = j.value("kademlia_bucket", 2u);
  if (j.contains("background_file")) c.background_file = j["background_file"].get<std::string>();
  return c;
}

struct DatasetManifest {
  DatasetConfig config;
  std::filesystem::path root;
  // Absolute paths per split, in split order train/val/test.
  std::array<std::vector<std::filesystem::path>, 3> splits;

  const std::vector<std::filesystem::path>& files(Split s) const {
    return splits[static_cast<std::size_t>(s)];
  }
};

inline constexpr const char* kManifestName = "manifest.json";

// One seed per graph; background, botnet and placement seeds derive from it.
inline std::uint64_t graph_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, 0x67726170ULL, index);
}

inline LabeledGraph generate_graph(const DatasetConfig& c, std::uint64_t seed,
                                   const Graph* background_override = nullptr) {
  Graph background = background_override
                         ? *background_override
                         : Graph::from_edges(gen_background(c.n_background, c.avg_degree,
                                                            derive_seed(seed, 1)),
                                             c.n_background);
  const BotnetParams params{c.debruijn_degree, c.kademlia_bucket};
  EdgeList botnet = gen_botnet(c.topology, c.bots, params, derive_seed(seed, 2));
  LabeledGraph lg = overlay(background, botnet, c.bots, derive_seed(seed, 3), c.topology);
  lg.meta.seed = seed;
  return lg;
}

inline std::string graph_file_name(Split s, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu.graph", kSplitNames[static_cast<std::size_t>(s)], k);
  return buf;
}

inline std::string format_manifest(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["format"] = "botgnn-dataset";
  j["version"] = 1;
  j["config"] = to_json(m.config);
  nlohmann::ordered_json splits;
  for (std::size_t s = 0; s < 3; ++s) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : m.splits[s]) arr.push_back(p.filename().string());
    splits[kSplitNames[s]] = arr;
  }
  j["splits"] = splits;
  return j.dump(2) + "\n";
}

// Writes one graph file per graph plus manifest.json into `out_dir`.
// `progress`, if given, is called after each graph is written.
inline DatasetManifest gen_dataset(
    const DatasetConfig& c, const std::filesystem::path& out_dir,
    const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  namespace fs = std::filesystem;
  if (c.graphs.train + c.graphs.val + c.graphs.test == 0) {
    throw ConfigError("dataset needs at least one graph");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::optional<Graph> background;
  if (c.background_file) {
    background = read_edge_list(*c.background_file);
    if (c.bots > background->n()) {
      throw ConfigError("bots exceed background node count in " + c.background_file->string());
    }
  } else if (c.bots > c.n_background) {
    throw ConfigError("bots (" + std::to_string(c.bots) + ") exceed n_background (" +
                      std::to_string(c.n_background) + ")");
  }

  DatasetManifest m;
  m.config = c;
  m.root = fs::absolute(out_dir);
  std::size_t index = 0;
  const std::size_t total = c.graphs.total();
  for (std::size_t s = 0; s < 3; ++s) {
    const auto split = static_cast<Split>(s);
    for (std::size_t k = 0; k < c.graphs[split]; ++k, ++index) {
      const LabeledGraph lg =
          generate_graph(c, graph_seed(c.seed, index), background ? &*background : nullptr);
      const fs::path path = m.root / graph_file_name(split, k);
      write_graph(path, lg);
      m.splits[s].push_back(path);
      if (progress) progress(index + 1, total);
    }
  }
  write_file_atomic(m.root / kManifestName, format_manifest(m));
  return m;
}

// Accepts the dataset directory or the manifest file itself.
inline DatasetManifest load_manifest(const std::filesystem::path& where) {
  namespace fs = std::filesystem;
  const fs::path file = fs::is_directory(where) ? where / kManifestName : where;
  if (!fs::exists(file)) throw IoError("manifest not found: " + file.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what(), 1);
  }
  DatasetManifest m;
  try {
    if (j.value("format", "") != "botgnn-dataset") {
      throw ParseError(file.string() + ": not a botgnn dataset manifest", 1);
    }
    m.config = dataset_config_from_json(j.at("config"));
    m.root = fs::absolute(file).parent_path();
    for (std::size_t s = 0; s < 3; ++s) {
      for (const auto& name : j.at("splits").at(kSplitNames[s])) {
        m.splits[s].push_back(m.root / name.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string() + ": " + e.what(), 1);
  }
  return m;
}

inline std::vector<LabeledGraph> load_split(const DatasetManifest& m, Split s) {
  std::vector<LabeledGraph> out;
  for (const auto& p : m.files(s)) out.push_back(read_graph(p));
  return out;
}

}  // namespace botgnn::topo
