#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "botgnn/analysis/metrics.hpp"
#include "botgnn/detector/gnn.hpp"
#include "botgnn/nn/adam.hpp"
#include "botgnn/nn/loss.hpp"
#include "botgnn/topo/dataset.hpp"

namespace botgnn::detector {

struct TrainConfig {
  double lr = 0.005;
  double weight_decay = 5e-4;
  double lr_decay_factor = 0.25;
  std::size_t plateau_patience = 1;
  std::size_t early_stop_patience = 5;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  nn::ClassWeights class_weights{};
  double threshold = 0.5;

  void validate() const {
    if (!(lr > 0)) throw ConfigError("TrainConfig: lr must be > 0");
    if (!(weight_decay >= 0)) throw ConfigError("TrainConfig: weight_decay must be >= 0");
    if (!(lr_decay_factor > 0 && lr_decay_factor < 1)) {
      throw ConfigError("TrainConfig: lr_decay_factor must be in (0, 1)");
    }
    if (plateau_patience < 1 || early_stop_patience < 1) {
      throw ConfigError("TrainConfig: patience values must be >= 1");
    }
    if (max_epochs < 1) throw ConfigError("TrainConfig: max_epochs must be >= 1");
  }
};

// Validation-loss bookkeeping for the learning-rate schedule and early
// stopping. The schedule follows the usual reduce-on-plateau rule: after
// more than `plateau_patience` consecutive epochs without a new best, the
// rate is cut and the count restarts. Training stops once
// `early_stop_patience` consecutive epochs pass without a new best.
class PlateauTracker {
 public:
  struct Decision {
    bool improved = false;
    bool reduce_lr = false;
    bool stop = false;
  };

  PlateauTracker(std::size_t plateau_patience, std::size_t early_stop_patience)
      : plateau_patience_(plateau_patience), early_stop_patience_(early_stop_patience) {}

  Decision observe(double val_loss) {
    Decision d;
    if (val_loss < best_) {
      best_ = val_loss;
      plateau_count_ = 0;
      stale_epochs_ = 0;
      d.improved = true;
      return d;
    }
    ++stale_epochs_;
    if (++plateau_count_ > plateau_patience_) {
      d.reduce_lr = true;
      plateau_count_ = 0;
    }
    d.stop = stale_epochs_ >= early_stop_patience_;
    return d;
  }

  double best() const { return best_; }

 private:
  std::size_t plateau_patience_;
  std::size_t early_stop_patience_;
  std::size_t plateau_count_ = 0;
  std::size_t stale_epochs_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  analysis::MetricsReport val_metrics;
  bool improved = false;
};

struct TrainResult {
  ModelParams params;  // best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

// Mean loss and macro-averaged metrics over a set of graphs.
struct Evaluation {
  double mean_loss = 0.0;
  analysis::MetricsReport metrics;
  std::vector<analysis::MetricsReport> per_graph;
};

inline Evaluation evaluate(const ModelParams& p, std::span<const PreparedGraph> graphs,
                           double threshold = 0.5, nn::ClassWeights weights = {}) {
  if (graphs.empty()) throw InputError("evaluate: no graphs");
  Evaluation ev;
  for (const auto& g : graphs) {
    const Tensor2 logits = gnn_logits(p, g.adjacency);
    ev.mean_loss += nn::softmax_cross_entropy(logits, g.labels, weights).loss;
    const Prediction pred = predict_from_logits(logits, threshold);
    ev.per_graph.push_back(analysis::compute_metrics(pred.labels, g.labels));
  }
  ev.mean_loss /= static_cast<double>(graphs.size());
  ev.metrics = analysis::aggregate_metrics(ev.per_graph);
  return ev;
}

// One optimizer step on one graph; returns the loss before the step.
inline double train_step(ModelParams& p, const PreparedGraph& g, const nn::AdamConfig& adam,
                         nn::ClassWeights weights) {
  Tape tape;
  const Var logits = gnn_forward(tape, p, g.adjacency);
  nn::LossResult loss = nn::softmax_cross_entropy(tape.value(logits), g.labels, weights);
  if (!std::isfinite(loss.loss)) return loss.loss;
  tape.backward(logits, loss.grad);
  const auto params = p.parameters();
  nn::adam_step(params, adam);
  return loss.loss;
}

using EpochCallback = std::function<void(const EpochRecord&)>;

// Full-graph training: one Adam step per training graph, one epoch per pass
// over the split in a seeded shuffled order. Returns the parameters of the
// epoch with the lowest mean validation loss.
inline TrainResult train(std::span<const PreparedGraph> train_set,
                         std::span<const PreparedGraph> val_set, const GnnConfig& gnn_cfg,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  gnn_cfg.validate();
  cfg.validate();
  if (train_set.empty()) throw InputError("train: empty training split");
  if (val_set.empty()) throw InputError("train: empty validation split");
  for (const auto& g : train_set) {
    if (g.adjacency.mode() != gnn_cfg.normalization) {
      throw ConfigError("train: graphs prepared with a different normalization");
    }
  }

  TrainResult result;
  ModelParams params = ModelParams::init(gnn_cfg, derive_seed(cfg.seed, 0x696e6974));
  result.params = params;
  nn::AdamConfig adam{cfg.lr, cfg.weight_decay};
  PlateauTracker tracker(cfg.plateau_patience, cfg.early_stop_patience);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, 0x6f72646572, epoch));
    shuffle(std::span<std::size_t>(order), rng);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = adam.lr;
    for (std::size_t k : order) {
      const double loss = train_step(params, train_set[k], adam, cfg.class_weights);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", training graph " + std::to_string(k));
      }
      rec.train_loss += loss;
    }
    rec.train_loss /= static_cast<double>(train_set.size());

    const Evaluation val = evaluate(params, val_set, cfg.threshold, cfg.class_weights);
    if (!std::isfinite(val.mean_loss)) {
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    rec.val_loss = val.mean_loss;
    rec.val_metrics = val.metrics;

    const auto decision = tracker.observe(val.mean_loss);
    rec.improved = decision.improved;
    if (decision.improved) {
      result.params = params;
      result.best_epoch = epoch;
    }
    if (decision.reduce_lr) adam.lr *= cfg.lr_decay_factor;
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (decision.stop) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

inline std::vector<PreparedGraph> prepare_all(std::span<const topo::LabeledGraph> graphs,
                                              Normalization mode) {
  std::vector<PreparedGraph> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.emplace_back(g, mode);
  return out;
}

inline std::vector<PreparedGraph> load_prepared(const topo::DatasetManifest& m, topo::Split s,
                                                Normalization mode) {
  std::vector<PreparedGraph> out;
  for (const auto& path : m.files(s)) out.emplace_back(topo::read_graph(path), mode);
  return out;
}

// Trains on the manifest's train split, selecting on its val split.
inline TrainResult train(const topo::DatasetManifest& m, const GnnConfig& gnn_cfg,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  const auto tr = load_prepared(m, topo::Split::kTrain, gnn_cfg.normalization);
  const auto va = load_prepared(m, topo::Split::kVal, gnn_cfg.normalization);
  return train(tr, va, gnn_cfg, cfg, on_epoch);
}

// Tab-separated table, one row per epoch.
inline std::string format_history(std::span<const EpochRecord> history) {
  std::string s = "epoch\ttrain_loss\tval_loss\tlr\tval_fp\tval_fn\tval_det\tval_f1\timproved\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%zu\t%.9g\t%.9g\t%.9g\t%.4f\t%.4f\t%.4f\t%.6f\t%d\n",
                  r.epoch, r.train_loss, r.val_loss, r.lr, r.val_metrics.fp_rate,
                  r.val_metrics.fn_rate, r.val_metrics.det_rate, r.val_metrics.f1,
                  r.improved ? 1 : 0);
    s += buf;
  }
  return s;
}

}  // namespace botgnn::detector
