#pragma once

// Featureless residual GNN. Every node starts from the scalar 1; each
// layer l computes
//
//   X_l = relu(X_{l-1} U_l + b_l + relu(A (X_{l-1} W_l)))
//
// with A the normalized adjacency, and a final linear layer maps X_L to
// two logits per node.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/graph/normalize.hpp"
#include "botgnn/nn/loss.hpp"
#include "botgnn/nn/param.hpp"
#include "botgnn/nn/tape.hpp"
#include "botgnn/random.hpp"
#include "botgnn/topo/graph_io.hpp"
#include "botgnn/topo/labeled_graph.hpp"

namespace botgnn::detector {

using nn::ParamTensor;
using nn::Tape;
using nn::Var;

struct GnnConfig {
  std::size_t layers = 12;
  std::size_t hidden = 32;
  Normalization normalization = Normalization::kSourceDegree;

  void validate() const {
    if (layers < 1) throw ConfigError("GnnConfig: layers must be >= 1");
    if (hidden < 1) throw ConfigError("GnnConfig: hidden must be >= 1");
  }
  friend bool operator==(const GnnConfig&, const GnnConfig&) = default;
};

struct GnnLayer {
  ParamTensor w;     // aggregation branch, h_{l-1} x h
  ParamTensor u;     // residual branch, h_{l-1} x h
  ParamTensor bias;  // 1 x h, added to the residual branch
};

struct ModelParams {
  GnnConfig config;
  std::vector<GnnLayer> layers;
  ParamTensor out_w;  // h x 2
  ParamTensor out_b;  // 1 x 2

  static ModelParams init(const GnnConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    ModelParams p;
    p.config = cfg;
    std::size_t in = 1;
    for (std::size_t l = 0; l < cfg.layers; ++l) {
      GnnLayer layer;
      layer.w = ParamTensor(nn::uniform_init(in, cfg.hidden, in, rng));
      layer.u = ParamTensor(nn::uniform_init(in, cfg.hidden, in, rng));
      layer.bias = ParamTensor(nn::uniform_init(1, cfg.hidden, in, rng));
      p.layers.push_back(std::move(layer));
      in = cfg.hidden;
    }
    p.out_w = ParamTensor(nn::uniform_init(cfg.hidden, 2, cfg.hidden, rng));
    p.out_b = ParamTensor(nn::uniform_init(1, 2, cfg.hidden, rng));
    return p;
  }

  std::vector<ParamTensor*> parameters() {
    std::vector<ParamTensor*> out;
    for (auto& l : layers) {
      out.push_back(&l.w);
      out.push_back(&l.u);
      out.push_back(&l.bias);
    }
    out.push_back(&out_w);
    out.push_back(&out_b);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t c = out_w.value.size() + out_b.value.size();
    for (const auto& l : layers) c += l.w.value.size() + l.u.value.size() + l.bias.value.size();
    return c;
  }

  // Throws ConfigError when any tensor disagrees with `config`.
  void check_shapes() const {
    config.validate();
    if (layers.size() != config.layers) {
      throw ConfigError("model has " + std::to_string(layers.size()) + " layers, config says " +
                        std::to_string(config.layers));
    }
    auto expect = [](const ParamTensor& t, std::size_t r, std::size_t c, const std::string& name) {
      if (t.value.rows() != r || t.value.cols() != c) {
        throw ConfigError("tensor " + name + " has shape " + t.value.shape_string() +
                          ", expected " + std::to_string(r) + "x" + std::to_string(c));
      }
    };
    std::size_t in = 1;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string id = "layer" + std::to_string(l + 1);
      expect(layers[l].w, in, config.hidden, id + ".W");
      expect(layers[l].u, in, config.hidden, id + ".U");
      expect(layers[l].bias, 1, config.hidden, id + ".bias");
      in = config.hidden;
    }
    expect(out_w, config.hidden, 2, "out.W");
    expect(out_b, 1, 2, "out.bias");
  }
};

// A graph ready for the GNN: self-loops added, adjacency normalized.
struct PreparedGraph {
  Graph graph;
  NormalizedAdjacency adjacency;
  std::vector<std::uint8_t> labels;

  PreparedGraph(const Graph& g, Normalization mode, std::vector<std::uint8_t> y = {})
      : graph(add_self_loops(g)), adjacency(graph, mode), labels(std::move(y)) {}

  explicit PreparedGraph(const topo::LabeledGraph& lg,
                         Normalization mode = Normalization::kSourceDegree)
      : PreparedGraph(lg.graph, mode, lg.labels) {}

  std::size_t n() const { return graph.n(); }
};

namespace detail {

inline void require_self_loops(const Graph& g) {
  if (g.self_loop_count() != g.n()) {
    throw InputError("gnn: graph must have a self-loop on every node");
  }
}

inline void check_input(const ModelParams& p, const NormalizedAdjacency& adj) {
  p.check_shapes();
  if (adj.mode() != p.config.normalization) {
    throw ConfigError("adjacency normalized as " + std::string(to_string(adj.mode())) +
                      " but model expects " + std::string(to_string(p.config.normalization)));
  }
}

inline void add_bias_rows(Tensor2& x, const Tensor2& bias) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) row[c] += bias(0, c);
  }
}

inline void relu_inplace(Tensor2& x) {
  for (double& v : x.values()) v = v > 0.0 ? v : 0.0;
}

}  // namespace detail

// Records the forward pass on `tape`; returns the n x 2 logits.
inline Var gnn_forward(Tape& tape, ModelParams& p, const NormalizedAdjacency& adj) {
  detail::check_input(p, adj);
  Var x = tape.constant(Tensor2(adj.n(), 1, 1.0));
  for (auto& layer : p.layers) {
    Var message = nn::relu(tape, nn::aggregate(tape, adj, nn::linear(tape, x, layer.w)));
    Var residual = nn::affine(tape, x, layer.u, layer.bias);
    x = nn::relu(tape, nn::add(tape, residual, message));
  }
  return nn::affine(tape, x, p.out_w, p.out_b);
}

// Tape-free forward pass over frozen parameters; the same kernels in the
// same order as gnn_forward, so the logits are bitwise identical.
inline Tensor2 gnn_logits(const ModelParams& p, const NormalizedAdjacency& adj) {
  detail::check_input(p, adj);
  Tensor2 x(adj.n(), 1, 1.0);
  for (const auto& layer : p.layers) {
    Tensor2 message = spmm(adj, matmul(x, layer.w.value));
    detail::relu_inplace(message);
    Tensor2 residual = matmul(x, layer.u.value);
    detail::add_bias_rows(residual, layer.bias.value);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      residual.values()[i] += message.values()[i];
    }
    detail::relu_inplace(residual);
    x = std::move(residual);
  }
  Tensor2 logits = matmul(x, p.out_w.value);
  detail::add_bias_rows(logits, p.out_b.value);
  return logits;
}

inline Tensor2 gnn_logits(const ModelParams& p, const Graph& g_with_loops) {
  detail::require_self_loops(g_with_loops);
  return gnn_logits(p, NormalizedAdjacency(g_with_loops, p.config.normalization));
}

struct Prediction {
  std::vector<double> probabilities;  // P(bot) per node
  std::vector<std::uint8_t> labels;
};

inline Prediction predict_from_logits(const Tensor2& logits, double threshold = 0.5) {
  const Tensor2 prob = nn::softmax(logits);
  Prediction out;
  out.probabilities.resize(logits.rows());
  out.labels.resize(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    out.probabilities[i] = prob(i, 1);
    out.labels[i] = prob(i, 1) >= threshold ? 1 : 0;
  }
  return out;
}

// `g` must carry a self-loop on every node.
inline Prediction predict(const ModelParams& p, const Graph& g, double threshold = 0.5) {
  return predict_from_logits(gnn_logits(p, g), threshold);
}

inline Prediction predict(const ModelParams& p, const PreparedGraph& pg, double threshold = 0.5) {
  return predict_from_logits(gnn_logits(p, pg.adjacency), threshold);
}

// ---- model file ----------------------------------------------------------
//
// JSON document:
//   {"format": "botgnn-model", "version": 1,
//    "config": {"layers": L, "hidden": h, "normalization": "...", "input": "all-ones"},
//    "tensors": [{"name": "layer1.W", "shape": [r, c], "values": [...]}, ...]}
// Tensors appear in parameters() order. Doubles are written with enough
// digits to round-trip exactly.

inline nlohmann::ordered_json model_to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["format"] = "botgnn-model";
  j["version"] = 1;
  j["config"] = {{"layers", p.config.layers},
                 {"hidden", p.config.hidden},
                 {"normalization", std::string(to_string(p.config.normalization))},
                 {"input", "all-ones"}};
  auto tensors = nlohmann::ordered_json::array();
  auto put = [&](const std::string& name, const ParamTensor& t) {
    nlohmann::ordered_json e;
    e["name"] = name;
    e["shape"] = {t.value.rows(), t.value.cols()};
    e["values"] = std::vector<double>(t.value.values().begin(), t.value.values().end());
    tensors.push_back(std::move(e));
  };
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const std::string id = "layer" + std::to_string(l + 1);
    put(id + ".W", p.layers[l].w);
    put(id + ".U", p.layers[l].u);
    put(id + ".bias", p.layers[l].bias);
  }
  put("out.W", p.out_w);
  put("out.bias", p.out_b);
  j["tensors"] = std::move(tensors);
  return j;
}

inline ModelParams model_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.value("format", "") != "botgnn-model") throw ConfigError("not a botgnn model file");
    if (j.value("version", 0) != 1) throw ConfigError("unsupported model version");
    ModelParams p;
    const auto& c = j.at("config");
    p.config.layers = c.at("layers").get<std::size_t>();
    p.config.hidden = c.at("hidden").get<std::size_t>();
    p.config.normalization = parse_normalization(c.at("normalization").get<std::string>());
    p.config.validate();
    std::vector<ParamTensor> tensors;
    for (const auto& e : j.at("tensors")) {
      const auto rows = e.at("shape").at(0).get<std::size_t>();
      const auto cols = e.at("shape").at(1).get<std::size_t>();
      const auto values = e.at("values").get<std::vector<double>>();
      if (values.size() != rows * cols) {
        throw ConfigError("tensor " + e.value("name", std::string("?")) + ": " +
                          std::to_string(values.size()) + " values for shape " +
                          std::to_string(rows) + "x" + std::to_string(cols));
      }
      Tensor2 t(rows, cols);
      std::copy(values.begin(), values.end(), t.values().begin());
      tensors.emplace_back(std::move(t));
    }
    if (tensors.size() != 3 * p.config.layers + 2) {
      throw ConfigError("model file has " + std::to_string(tensors.size()) +
                        " tensors, expected " + std::to_string(3 * p.config.layers + 2));
    }
    std::size_t k = 0;
    for (std::size_t l = 0; l < p.config.layers; ++l) {
      GnnLayer layer;
      layer.w = std::move(tensors[k++]);
      layer.u = std::move(tensors[k++]);
      layer.bias = std::move(tensors[k++]);
      p.layers.push_back(std::move(layer));
    }
    p.out_w = std::move(tensors[k++]);
    p.out_b = std::move(tensors[k++]);
    p.check_shapes();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const ModelParams& p) {
  write_file_atomic(path, model_to_json(p).dump() + "\n");
}

inline ModelParams load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace botgnn::detector
