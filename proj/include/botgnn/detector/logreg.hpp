#pragma once

// Degree-feature logistic regression baseline. Per node: own degree and the
// mean, max and min of its neighbors' degrees.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

#include "botgnn/errors.hpp"
#include "botgnn/graph/graph.hpp"
#include "botgnn/tensor.hpp"
#include "botgnn/topo/graph_io.hpp"
#include "botgnn/topo/labeled_graph.hpp"

namespace botgnn::detector {

inline constexpr std::size_t kLrFeatures = 4;

// n x 4 features. Self-loops do not count as neighbors; nodes without any
// other neighbor get all zeros.
inline Tensor2 lr_features(const Graph& g) {
  Tensor2 f(g.n(), kLrFeatures);
  for (NodeId i = 0; i < g.n(); ++i) {
    double sum = 0.0, mx = 0.0, mn = 0.0;
    std::size_t count = 0;
    for (NodeId j : g.neighbors(i)) {
      if (j == i) continue;
      const auto d = static_cast<double>(g.degree(j));
      sum += d;
      mx = count == 0 ? d : std::max(mx, d);
      mn = count == 0 ? d : std::min(mn, d);
      ++count;
    }
    if (count == 0) continue;
    f(i, 0) = static_cast<double>(g.degree(i));
    f(i, 1) = sum / static_cast<double>(count);
    f(i, 2) = mx;
    f(i, 3) = mn;
  }
  return f;
}

struct LrModel {
  std::array<double, kLrFeatures> weights{};
  double bias = 0.0;
  std::array<double, kLrFeatures> mean{};
  std::array<double, kLrFeatures> stddev{1.0, 1.0, 1.0, 1.0};

  friend bool operator==(const LrModel&, const LrModel&) = default;
};

struct LrTrainConfig {
  std::size_t epochs = 1000;
  double lr = 0.5;
};

inline constexpr double kStdFloor = 1e-12;

inline Tensor2 standardize(const Tensor2& features, const LrModel& m) {
  Tensor2 z = features;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t c = 0; c < kLrFeatures; ++c) z(i, c) = (z(i, c) - m.mean[c]) / m.stddev[c];
  }
  return z;
}

// Mean logistic loss over rows of standardized features `z`; writes the
// gradient into `grad_w` and `grad_b`.
inline double logistic_loss(const LrModel& m, const Tensor2& z, std::span<const std::uint8_t> y,
                            std::array<double, kLrFeatures>& grad_w, double& grad_b) {
  grad_w.fill(0.0);
  grad_b = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double s = m.bias;
    for (std::size_t c = 0; c < kLrFeatures; ++c) s += m.weights[c] * z(i, c);
    // log(1 + e^s) - y s, written to stay finite for large |s|.
    const double softplus = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    const double t = y[i] ? 1.0 : 0.0;
    loss += softplus - t * s;
    const double p = s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
    const double r = p - t;
    for (std::size_t c = 0; c < kLrFeatures; ++c) grad_w[c] += r * z(i, c);
    grad_b += r;
  }
  const double inv = z.rows() ? 1.0 / static_cast<double>(z.rows()) : 0.0;
  for (double& g : grad_w) g *= inv;
  grad_b *= inv;
  return loss * inv;
}

// Fits on pre-computed raw features pooled across graphs. Standardization
// statistics come from the same rows and are stored in the model.
inline LrModel train_lr(const Tensor2& features, std::span<const std::uint8_t> labels,
                        const LrTrainConfig& cfg = {}) {
  if (features.rows() == 0) throw InputError("train_lr: no training rows");
  if (features.rows() != labels.size()) throw InputError("train_lr: label count mismatch");
  LrModel m;
  const auto n = static_cast<double>(features.rows());
  for (std::size_t c = 0; c < kLrFeatures; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < features.rows(); ++i) s += features(i, c);
    m.mean[c] = s / n;
    double v = 0.0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
      const double d = features(i, c) - m.mean[c];
      v += d * d;
    }
    m.stddev[c] = std::max(std::sqrt(v / n), kStdFloor);
  }
  const Tensor2 z = standardize(features, m);
  std::array<double, kLrFeatures> gw{};
  double gb = 0.0;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    logistic_loss(m, z, labels, gw, gb);
    for (std::size_t c = 0; c < kLrFeatures; ++c) m.weights[c] -= cfg.lr * gw[c];
    m.bias -= cfg.lr * gb;
  }
  return m;
}

inline LrModel train_lr(std::span<const topo::LabeledGraph> graphs, const LrTrainConfig& cfg = {}) {
  if (graphs.empty()) throw InputError("train_lr: empty training split");
  std::size_t rows = 0;
  for (const auto& g : graphs) rows += g.graph.n();
  Tensor2 all(rows, kLrFeatures);
  std::vector<std::uint8_t> labels;
  labels.reserve(rows);
  std::size_t r = 0;
  for (const auto& g : graphs) {
    const Tensor2 f = lr_features(g.graph);
    std::copy(f.values().begin(), f.values().end(), all.values().begin() + static_cast<std::ptrdiff_t>(r * kLrFeatures));
    r += f.rows();
    labels.insert(labels.end(), g.labels.begin(), g.labels.end());
  }
  return train_lr(all, labels, cfg);
}

inline std::vector<double> lr_predict_proba(const LrModel& m, const Graph& g) {
  const Tensor2 z = standardize(lr_features(g), m);
  std::vector<double> p(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    double s = m.bias;
    for (std::size_t c = 0; c < kLrFeatures; ++c) s += m.weights[c] * z(i, c);
    p[i] = s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
  }
  return p;
}

inline std::vector<std::uint8_t> lr_predict(const LrModel& m, const Graph& g,
                                            double threshold = 0.5) {
  const auto p = lr_predict_proba(m, g);
  std::vector<std::uint8_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

inline nlohmann::ordered_json lr_to_json(const LrModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "botgnn-lr";
  j["version"] = 1;
  j["features"] = {"degree", "neighbor_degree_mean", "neighbor_degree_max",
                   "neighbor_degree_min"};
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["mean"] = m.mean;
  j["std"] = m.stddev;
  return j;
}

inline LrModel lr_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.value("format", "") != "botgnn-lr") throw ConfigError("not a botgnn LR model file");
    LrModel m;
    m.weights = j.at("weights").get<std::array<double, kLrFeatures>>();
    m.bias = j.at("bias").get<double>();
    m.mean = j.at("mean").get<std::array<double, kLrFeatures>>();
    m.stddev = j.at("std").get<std::array<double, kLrFeatures>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed LR model file: ") + e.what());
  }
}

inline void save_lr(const std::filesystem::path& path, const LrModel& m) {
  write_file_atomic(path, lr_to_json(m).dump(2) + "\n");
}

inline LrModel load_lr(const std::filesystem::path& path) {
  try {
    return lr_from_json(nlohmann::ordered_json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace botgnn::detector
