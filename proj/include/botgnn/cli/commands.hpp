#pragma once

// Subcommand implementations behind the botgnn executable. Each command
// takes its resolved options and the text of the run configuration, writes
// its outputs atomically, and throws on failure; run_guarded() maps the
// exception type to the process exit code.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "botgnn/analysis/topology_report.hpp"
#include "botgnn/detector/logreg.hpp"
#include "botgnn/detector/train.hpp"
#include "botgnn/topo/dataset.hpp"

namespace botgnn::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfig = 2, kIo = 3, kNumeric = 4 };

inline constexpr const char* kRunConfigName = "run_config.toml";

// Runs `body`, reporting any failure on `err` and translating it into an
// exit code.
inline int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
}

// "8,1,1" or a single total such as "10".
inline topo::SplitCounts parse_split_counts(const std::string& text) {
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("--graphs: cannot parse '" + text + "' (expected N or TRAIN,VAL,TEST)");
    }
  }
  if (parts.size() == 1) return topo::split_counts(parts[0]);
  if (parts.size() != 3) {
    throw ConfigError("--graphs: expected N or TRAIN,VAL,TEST, got '" + text + "'");
  }
  return {parts[0], parts[1], parts[2]};
}

inline void write_run_config(const fs::path& dir, const std::string& run_config) {
  write_file_atomic(dir / kRunConfigName, run_config);
}

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  topo::DatasetConfig dataset;
  fs::path out;
  std::string run_config;
};

inline void cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  const auto m = topo::gen_dataset(o.dataset, o.out, [&](std::size_t done, std::size_t total) {
    err << "gen: " << done << "/" << total << " graphs\n";
  });
  write_run_config(o.out, o.run_config);
  out << "wrote " << m.config.graphs.total() << " graphs to " << m.root.string() << "\n";
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  fs::path data;
  fs::path out;
  detector::GnnConfig gnn;
  detector::TrainConfig train;
  std::string run_config;
};

inline void cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  const auto manifest = topo::load_manifest(o.data);
  const auto result = detector::train(manifest, o.gnn, o.train, [&](const detector::EpochRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "epoch %zu train_loss %.6f val_loss %.6f lr %.6g val_f1 %.4f%s\n",
                  r.epoch, r.train_loss, r.val_loss, r.lr, r.val_metrics.f1,
                  r.improved ? " *" : "");
    err << buf;
  });
  fs::create_directories(o.out);
  detector::save_model(o.out / "model.json", result.params);
  write_file_atomic(o.out / "history.tsv", detector::format_history(result.history));
  std::string summary;
  summary += "epochs=" + std::to_string(result.history.size()) + "\n";
  summary += "best_epoch=" + std::to_string(result.best_epoch) + "\n";
  summary += "best_val_loss=" +
             fmt("%.9g", result.history[result.best_epoch - 1].val_loss) + "\n";
  summary += std::string("early_stopped=") + (result.early_stopped ? "1" : "0") + "\n";
  write_file_atomic(o.out / "summary.txt", summary);
  write_run_config(o.out, o.run_config);
  out << summary;
}

// ---------------------------------------------------------------- eval

enum class Baseline { kGnn, kLr };

inline Baseline parse_baseline(const std::string& s) {
  if (s == "gnn") return Baseline::kGnn;
  if (s == "lr") return Baseline::kLr;
  throw ConfigError("unknown baseline '" + s + "' (expected gnn or lr)");
}

inline topo::Split parse_split(const std::string& s) {
  for (std::size_t i = 0; i < topo::kSplitNames.size(); ++i) {
    if (s == topo::kSplitNames[i]) return static_cast<topo::Split>(i);
  }
  throw ConfigError("unknown split '" + s + "' (expected train, val or test)");
}

struct EvalOptions {
  fs::path data;
  std::optional<fs::path> model;
  Baseline baseline = Baseline::kGnn;
  topo::Split split = topo::Split::kTest;
  double threshold = 0.5;
  // Architecture the caller expects; checked against the model file.
  std::optional<std::size_t> expect_layers;
  std::optional<std::size_t> expect_hidden;
  detector::LrTrainConfig lr;
  std::optional<fs::path> out;
  std::string run_config;
};

struct EvalTable {
  std::vector<std::string> names;
  std::vector<analysis::MetricsReport> per_graph;
  analysis::MetricsReport mean;
};

inline std::string format_eval_table(const EvalTable& t) {
  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %9s %9s %9s %8s\n", "graph", "FP%", "FN%", "DET%", "F1");
  s += buf;
  auto row = [&](const std::string& name, const analysis::MetricsReport& r) {
    std::snprintf(buf, sizeof buf, "%-20s %9.3f %9.3f %9.3f %8.4f\n", name.c_str(), r.fp_rate,
                  r.fn_rate, r.det_rate, r.f1);
    s += buf;
  };
  for (std::size_t i = 0; i < t.names.size(); ++i) row(t.names[i], t.per_graph[i]);
  row("mean", t.mean);
  return s;
}

inline std::string format_eval_tsv(const EvalTable& t) {
  std::string s = "graph\ttp\tfp\ttn\tfn\tfp_rate\tfn_rate\tdet_rate\tf1\n";
  auto row = [&](const std::string& name, const analysis::MetricsReport& r) {
    s += name + "\t" + std::to_string(r.tp) + "\t" + std::to_string(r.fp) + "\t" +
         std::to_string(r.tn) + "\t" + std::to_string(r.fn) + "\t" + fmt("%.6f", r.fp_rate) +
         "\t" + fmt("%.6f", r.fn_rate) + "\t" + fmt("%.6f", r.det_rate) + "\t" +
         fmt("%.6f", r.f1) + "\n";
  };
  for (std::size_t i = 0; i < t.names.size(); ++i) row(t.names[i], t.per_graph[i]);
  row("mean", t.mean);
  return s;
}

inline EvalTable evaluate_split(const EvalOptions& o, std::ostream& err) {
  const auto manifest = topo::load_manifest(o.data);
  const auto files = manifest.files(o.split);
  if (files.empty()) {
    throw InputError(std::string("split '") + topo::kSplitNames[static_cast<int>(o.split)] +
                     "' has no graphs");
  }
  EvalTable t;
  if (o.baseline == Baseline::kLr) {
    const auto train_graphs = topo::load_split(manifest, topo::Split::kTrain);
    const auto model = detector::train_lr(train_graphs, o.lr);
    if (o.out) detector::save_lr(*o.out / "lr_model.json", model);
    for (const auto& f : files) {
      const auto lg = topo::read_graph(f);
      const auto pred = detector::lr_predict(model, lg.graph, o.threshold);
      t.names.push_back(f.filename().string());
      t.per_graph.push_back(analysis::compute_metrics(pred, lg.labels));
    }
  } else {
    if (!o.model) throw ConfigError("eval: --model is required unless --baseline lr");
    const auto params = detector::load_model(*o.model);
    if (o.expect_hidden && *o.expect_hidden != params.config.hidden) {
      throw ConfigError("model " + o.model->string() + " has hidden size " +
                        std::to_string(params.config.hidden) + ", expected " +
                        std::to_string(*o.expect_hidden));
    }
    if (o.expect_layers && *o.expect_layers != params.config.layers) {
      throw ConfigError("model " + o.model->string() + " has " +
                        std::to_string(params.config.layers) + " layers, expected " +
                        std::to_string(*o.expect_layers));
    }
    for (const auto& f : files) {
      const detector::PreparedGraph g(topo::read_graph(f), params.config.normalization);
      const auto pred = detector::predict(params, g, o.threshold);
      t.names.push_back(f.filename().string());
      t.per_graph.push_back(analysis::compute_metrics(pred.labels, g.labels));
      err << "eval: " << t.names.size() << "/" << files.size() << " graphs\n";
    }
  }
  t.mean = analysis::aggregate_metrics(t.per_graph);
  return t;
}

inline void cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  if (o.out) fs::create_directories(*o.out);
  const EvalTable t = evaluate_split(o, err);
  out << format_eval_table(t);
  out << "\n" << analysis::to_key_value(t.mean, "mean.");
  if (o.out) {
    write_file_atomic(*o.out / "metrics.tsv", format_eval_tsv(t));
    write_file_atomic(*o.out / "metrics.txt", analysis::to_key_value(t.mean, "mean."));
    write_run_config(*o.out, o.run_config);
  }
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
  fs::path graph;  // graph file; labels, if any, are ignored
  fs::path model;
  double threshold = 0.5;
  fs::path out;  // output TSV
  std::string run_config;
};

inline void cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream&) {
  const auto params = detector::load_model(o.model);
  const auto lg = topo::read_graph(o.graph);
  const auto pred = detector::predict(
      params, detector::PreparedGraph(lg.graph, params.config.normalization), o.threshold);
  std::string s = "node\tprobability\tlabel\n";
  std::size_t positives = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    s += std::to_string(i) + "\t" + fmt("%.9g", pred.probabilities[i]) + "\t" +
         std::to_string(pred.labels[i]) + "\n";
    positives += pred.labels[i];
  }
  write_file_atomic(o.out, s);
  const fs::path dir = o.out.has_parent_path() ? o.out.parent_path() : fs::path(".");
  write_run_config(dir, o.run_config);
  out << "nodes=" << pred.labels.size() << "\npredicted_bots=" << positives << "\n";
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string topology = "all";  // "all" or one topology name
  std::uint32_t n = 10000;
  std::uint64_t seed = 0;
  topo::BotnetParams botnet{10, 2};
  std::optional<fs::path> graph;  // labeled graph file: mixing summary
  std::optional<fs::path> edges;  // plain edge list
  analysis::TopologyOptions analysis;
  std::optional<fs::path> out;
  std::string run_config;
};

inline std::string format_topology_table(
    const std::vector<std::pair<std::string, analysis::TopologyReport>>& rows) {
  std::string s;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-12s %9s %10s %5s %10s %8s  %s\n", "topology", "n", "m", "comp",
                "lambda2", "l_G", "flags");
  s += buf;
  for (const auto& [name, r] : rows) {
    std::string flags;
    if (r.degenerate) flags += "degenerate ";
    if (r.largest_component_only) flags += "largest-component ";
    if (r.bipartite) flags += "bipartite ";
    if (r.path_length_sampled) flags += "sampled ";
    if (!flags.empty()) flags.pop_back();
    std::snprintf(buf, sizeof buf, "%-12s %9zu %10zu %5zu %10.6f %8.4f  %s\n", name.c_str(), r.n,
                  r.m, r.component_count, r.lambda2, r.avg_path_length,
                  flags.empty() ? "-" : flags.c_str());
    s += buf;
  }
  return s;
}

inline void cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, analysis::TopologyReport>> rows;
  if (o.graph) {
    const auto lg = topo::read_graph(*o.graph);
    const auto s = analysis::mixing_summary(lg, o.analysis);
    rows.emplace_back("botnet", s.botnet);
    rows.emplace_back("full", s.full);
  } else if (o.edges) {
    rows.emplace_back(o.edges->filename().string(),
                      analysis::analyze_topology(topo::read_edge_list(*o.edges), o.analysis));
  } else {
    std::vector<topo::TopologyKind> kinds;
    if (o.topology == "all") {
      kinds = {topo::TopologyKind::kDeBruijn, topo::TopologyKind::kChord,
               topo::TopologyKind::kKademlia, topo::TopologyKind::kLeetChord};
    } else {
      kinds = {topo::parse_topology(o.topology)};
    }
    for (auto k : kinds) {
      if (k == topo::TopologyKind::kNone) throw ConfigError("analyze: 'none' has no topology");
      err << "analyze: " << topo::to_string(k) << "\n";
      const Graph g = Graph::from_edges(topo::gen_botnet(k, o.n, o.botnet, o.seed), o.n);
      rows.emplace_back(std::string(topo::to_string(k)), analysis::analyze_topology(g, o.analysis));
    }
  }
  const std::string table = format_topology_table(rows);
  out << table;
  if (o.out) {
    std::string kv;
    for (const auto& [name, r] : rows) kv += analysis::to_key_value(r, name + ".");
    write_file_atomic(*o.out / "analysis.txt", kv);
    write_file_atomic(*o.out / "analysis_table.txt", table);
    write_run_config(*o.out, o.run_config);
  }
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::vector<fs::path> data;
  std::vector<std::size_t> layers{2, 4, 6, 8, 10, 12};
  std::size_t seeds = 3;
  std::uint64_t base_seed = 0;
  std::size_t hidden = 32;
  Normalization normalization = Normalization::kSourceDegree;
  detector::TrainConfig train;
  fs::path out;
  std::string run_config;
};

struct SweepCell {
  std::string dataset;  // as given on the command line
  std::size_t layers = 0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double det_rate = 0.0;
  double fp_rate = 0.0;
  std::size_t epochs = 0;
};

inline constexpr const char* kSweepStateName = "sweep_state.json";

// Settings that must match for a previous sweep's cells to be reused.
inline nlohmann::ordered_json sweep_key(const SweepOptions& o) {
  nlohmann::ordered_json j;
  j["hidden"] = o.hidden;
  j["normalization"] = std::string(to_string(o.normalization));
  j["lr"] = o.train.lr;
  j["weight_decay"] = o.train.weight_decay;
  j["lr_decay_factor"] = o.train.lr_decay_factor;
  j["plateau_patience"] = o.train.plateau_patience;
  j["early_stop_patience"] = o.train.early_stop_patience;
  j["max_epochs"] = o.train.max_epochs;
  j["threshold"] = o.train.threshold;
  return j;
}

inline std::string cell_id(const std::string& dataset, std::size_t layers, std::uint64_t seed) {
  return dataset + "|" + std::to_string(layers) + "|" + std::to_string(seed);
}

inline std::string format_sweep_csv(const std::vector<SweepCell>& cells,
                                    const std::vector<std::pair<std::string, std::string>>& sets,
                                    const std::vector<std::size_t>& layers) {
  std::string s = "topology,dataset,layers,runs,mean_f1,std_f1\n";
  for (const auto& [dataset, topology] : sets) {
    for (std::size_t l : layers) {
      std::vector<double> f1;
      for (const auto& c : cells) {
        if (c.dataset == dataset && c.layers == l) f1.push_back(c.f1);
      }
      if (f1.empty()) continue;
      double mean = 0.0;
      for (double v : f1) mean += v;
      mean /= static_cast<double>(f1.size());
      double var = 0.0;
      for (double v : f1) var += (v - mean) * (v - mean);
      const double sd = f1.size() > 1 ? std::sqrt(var / static_cast<double>(f1.size() - 1)) : 0.0;
      s += topology + "," + dataset + "," + std::to_string(l) + "," + std::to_string(f1.size()) +
           "," + fmt("%.6f", mean) + "," + fmt("%.6f", sd) + "\n";
    }
  }
  return s;
}

inline void cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  if (o.data.empty()) throw ConfigError("sweep: at least one --data directory is required");
  if (o.layers.empty()) throw ConfigError("sweep: --layers is empty");
  if (o.seeds < 1) throw ConfigError("sweep: --seeds must be >= 1");
  fs::create_directories(o.out);
  const fs::path state_path = o.out / kSweepStateName;
  const auto key = sweep_key(o);

  std::vector<SweepCell> cells;
  if (fs::exists(state_path)) {
    nlohmann::ordered_json state;
    try {
      state = nlohmann::ordered_json::parse(read_file(state_path));
      if (state.at("settings") != key) {
        throw ConfigError("sweep: " + state_path.string() +
                          " was written with different training settings; use a new --out");
      }
      for (const auto& c : state.at("cells")) {
        cells.push_back({c.at("dataset").get<std::string>(), c.at("layers").get<std::size_t>(),
                         c.at("seed").get<std::uint64_t>(), c.at("f1").get<double>(),
                         c.at("det_rate").get<double>(), c.at("fp_rate").get<double>(),
                         c.at("epochs").get<std::size_t>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError("unreadable sweep state " + state_path.string() + ": " + e.what());
    }
    err << "sweep: resuming with " << cells.size() << " completed cells\n";
  }
  std::map<std::string, bool> done;
  for (const auto& c : cells) done[cell_id(c.dataset, c.layers, c.seed)] = true;

  auto save_state = [&] {
    nlohmann::ordered_json state;
    state["format"] = "botgnn-sweep";
    state["version"] = 1;
    state["settings"] = key;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
      arr.push_back({{"dataset", c.dataset}, {"layers", c.layers}, {"seed", c.seed},
                     {"f1", c.f1}, {"det_rate", c.det_rate}, {"fp_rate", c.fp_rate},
                     {"epochs", c.epochs}});
    }
    state["cells"] = arr;
    write_file_atomic(state_path, state.dump(2) + "\n");
  };

  std::vector<std::pair<std::string, std::string>> sets;
  const std::size_t total = o.data.size() * o.layers.size() * o.seeds;
  std::size_t finished = done.size();
  for (const auto& dir : o.data) {
    const auto manifest = topo::load_manifest(dir);
    const std::string name = dir.string();
    sets.emplace_back(name, std::string(topo::to_string(manifest.config.topology)));
    std::optional<std::vector<detector::PreparedGraph>> tr, va, te;
    for (std::size_t l : o.layers) {
      for (std::size_t k = 0; k < o.seeds; ++k) {
        const std::uint64_t seed = o.base_seed + k;
        if (done.count(cell_id(name, l, seed))) continue;
        if (!tr) {
          tr = detector::load_prepared(manifest, topo::Split::kTrain, o.normalization);
          va = detector::load_prepared(manifest, topo::Split::kVal, o.normalization);
          te = detector::load_prepared(manifest, topo::Split::kTest, o.normalization);
        }
        detector::TrainConfig tc = o.train;
        tc.seed = seed;
        const auto res = detector::train(*tr, *va, {l, o.hidden, o.normalization}, tc);
        const auto ev = detector::evaluate(res.params, *te, tc.threshold);
        cells.push_back({name, l, seed, ev.metrics.f1, ev.metrics.det_rate, ev.metrics.fp_rate,
                         res.history.size()});
        done[cell_id(name, l, seed)] = true;
        save_state();
        ++finished;
        char buf[200];
        std::snprintf(buf, sizeof buf, "sweep: %zu/%zu %s layers=%zu seed=%llu f1=%.4f\n",
                      finished, total, name.c_str(), l, static_cast<unsigned long long>(seed),
                      ev.metrics.f1);
        err << buf;
      }
    }
  }
  const std::string csv = format_sweep_csv(cells, sets, o.layers);
  write_file_atomic(o.out / "sweep.csv", csv);
  write_run_config(o.out, o.run_config);
  out << csv;
}

}  // namespace botgnn::cli
