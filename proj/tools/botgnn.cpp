#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "botgnn/cli/commands.hpp"

namespace {

using namespace botgnn;

struct TrainFlags {
  detector::TrainConfig cfg;
  std::vector<double> class_weights{1.0, 1.0};
  std::string normalization = "source-degree";
};

void add_train_flags(CLI::App* sub, TrainFlags& f) {
  sub->add_option("--normalization", f.normalization,
                  "adjacency normalization: source-degree, symmetric, row-stochastic")
      ->capture_default_str();
  sub->add_option("--lr", f.cfg.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--weight-decay", f.cfg.weight_decay, "L2 weight decay")->capture_default_str();
  sub->add_option("--lr-decay", f.cfg.lr_decay_factor, "learning-rate factor on plateau")
      ->capture_default_str();
  sub->add_option("--plateau-patience", f.cfg.plateau_patience)->capture_default_str();
  sub->add_option("--early-stop-patience", f.cfg.early_stop_patience)->capture_default_str();
  sub->add_option("--max-epochs", f.cfg.max_epochs)->capture_default_str();
  sub->add_option("--threshold", f.cfg.threshold, "decision threshold on P(bot)")
      ->capture_default_str();
  sub->add_option("--class-weights", f.class_weights, "loss weights NEG,POS")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
}

detector::TrainConfig resolve(const TrainFlags& f) {
  detector::TrainConfig c = f.cfg;
  c.class_weights = {f.class_weights.at(0), f.class_weights.at(1)};
  return c;
}

// Options of the invoked subcommand, one `sub.key=value` line each, in the
// format --config reads back.
std::string run_config_text(const CLI::App& app, const CLI::App* sub) {
  const std::string all = app.config_to_str(true, false);
  const std::string prefix = sub->get_name() + ".";
  std::istringstream in(all);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) out += line + "\n";
  }
  return out;
}

// Records the resolved value as the default so the stored run config holds
// the value actually used, not the flag's nominal default.
template <typename T>
void record_resolved(CLI::Option* opt, const T& value) {
  if (opt->count() == 0) {
    std::ostringstream ss;
    ss.precision(17);
    ss << value;
    opt->default_str(ss.str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Botnet detection on communication graphs with a message-passing GNN"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a key=value file; flags override it");

  std::function<void(std::string)> action;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a labeled graph dataset");
  std::string topology = "chord", preset = "desk", graphs = "8,1,1";
  topo::DatasetConfig dcfg;
  std::string gen_out, background_file;
  gen->add_option("--preset", preset, "desk or full (full uses the large dataset sizes)")
      ->capture_default_str();
  gen->add_option("--topology", topology, "debruijn, chord, kademlia, leet-chord or none")
      ->capture_default_str();
  auto* o_nbg = gen->add_option("--n-background", dcfg.n_background)->capture_default_str();
  auto* o_deg = gen->add_option("--avg-degree", dcfg.avg_degree)->capture_default_str();
  auto* o_bots = gen->add_option("--bots", dcfg.bots)->capture_default_str();
  auto* o_graphs =
      gen->add_option("--graphs", graphs, "TRAIN,VAL,TEST or a total split 8:1:1")
          ->capture_default_str();
  gen->add_option("--seed", dcfg.seed)->capture_default_str();
  gen->add_option("--debruijn-degree", dcfg.debruijn_degree)->capture_default_str();
  gen->add_option("--kademlia-bucket", dcfg.kademlia_bucket)->capture_default_str();
  gen->add_option("--background-file", background_file, "edge list used as every background");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->callback([&] {
    action = [&](std::string run_config) {
      topo::DatasetConfig c = dcfg;
      const auto kind = topo::parse_topology(topology);
      if (preset == "full") {
        c = topo::full_preset(kind, dcfg.seed);
        c.debruijn_degree = dcfg.debruijn_degree;
        c.kademlia_bucket = dcfg.kademlia_bucket;
        if (o_nbg->count()) c.n_background = dcfg.n_background;
        if (o_deg->count()) c.avg_degree = dcfg.avg_degree;
        if (o_bots->count()) c.bots = dcfg.bots;
        if (o_graphs->count()) c.graphs = cli::parse_split_counts(graphs);
      } else if (preset == "desk") {
        c.graphs = cli::parse_split_counts(graphs);
      } else {
        throw ConfigError("unknown preset '" + preset + "' (expected desk or full)");
      }
      c.topology = kind;
      if (!background_file.empty()) c.background_file = background_file;
      cli::GenOptions o{c, gen_out, std::move(run_config)};
      cli::cmd_gen(o, std::cout, std::cerr);
    };
  });

  // train
  auto* train = app.add_subcommand("train", "train the GNN on a dataset");
  cli::TrainOptions topt;
  TrainFlags train_flags;
  std::string train_data, train_out;
  train->add_option("--data", train_data, "dataset directory or manifest")->required();
  train->add_option("--out", train_out, "run directory")->required();
  train->add_option("--layers", topt.gnn.layers)->capture_default_str();
  train->add_option("--hidden", topt.gnn.hidden)->capture_default_str();
  train->add_option("--seed", train_flags.cfg.seed)->capture_default_str();
  add_train_flags(train, train_flags);
  train->callback([&] {
    action = [&](std::string run_config) {
      topt.data = train_data;
      topt.out = train_out;
      topt.gnn.normalization = parse_normalization(train_flags.normalization);
      topt.train = resolve(train_flags);
      topt.run_config = std::move(run_config);
      cli::cmd_train(topt, std::cout, std::cerr);
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model or the LR baseline on a split");
  cli::EvalOptions eopt;
  std::string eval_data, eval_model, eval_out, baseline = "gnn", split = "test";
  std::size_t expect_layers = 0, expect_hidden = 0;
  eval->add_option("--data", eval_data, "dataset directory or manifest")->required();
  eval->add_option("--model", eval_model, "model.json written by train");
  eval->add_option("--baseline", baseline, "gnn or lr")->capture_default_str();
  eval->add_option("--split", split, "train, val or test")->capture_default_str();
  eval->add_option("--threshold", eopt.threshold)->capture_default_str();
  auto* o_el = eval->add_option("--layers", expect_layers, "expected number of layers");
  auto* o_eh = eval->add_option("--hidden", expect_hidden, "expected hidden size");
  eval->add_option("--lr-epochs", eopt.lr.epochs, "LR baseline gradient steps")
      ->capture_default_str();
  eval->add_option("--lr-rate", eopt.lr.lr, "LR baseline step size")->capture_default_str();
  eval->add_option("--out", eval_out, "directory for metrics files");
  eval->callback([&] {
    action = [&](std::string run_config) {
      eopt.data = eval_data;
      if (!eval_model.empty()) eopt.model = eval_model;
      if (!eval_out.empty()) eopt.out = eval_out;
      eopt.baseline = cli::parse_baseline(baseline);
      eopt.split = cli::parse_split(split);
      if (o_el->count()) eopt.expect_layers = expect_layers;
      if (o_eh->count()) eopt.expect_hidden = expect_hidden;
      eopt.run_config = std::move(run_config);
      cli::cmd_eval(eopt, std::cout, std::cerr);
    };
  });

  // predict
  auto* pred = app.add_subcommand("predict", "label the nodes of one graph");
  cli::PredictOptions popt;
  std::string pred_graph, pred_model, pred_out;
  pred->add_option("--graph", pred_graph, "graph file")->required();
  pred->add_option("--model", pred_model, "model.json")->required();
  pred->add_option("--threshold", popt.threshold)->capture_default_str();
  pred->add_option("--out", pred_out, "output TSV")->required();
  pred->callback([&] {
    action = [&](std::string run_config) {
      popt.graph = pred_graph;
      popt.model = pred_model;
      popt.out = pred_out;
      popt.run_config = std::move(run_config);
      cli::cmd_predict(popt, std::cout, std::cerr);
    };
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "spectral and path-length diagnostics");
  cli::AnalyzeOptions aopt;
  std::string an_graph, an_edges, an_out, l2_mode = "signed";
  analyze->add_option("--topology", aopt.topology, "all or one topology name")
      ->capture_default_str();
  analyze->add_option("--n", aopt.n, "nodes per generated topology")->capture_default_str();
  analyze->add_option("--seed", aopt.seed)->capture_default_str();
  analyze->add_option("--debruijn-degree", aopt.botnet.debruijn_degree)->capture_default_str();
  analyze->add_option("--kademlia-bucket", aopt.botnet.kademlia_bucket)->capture_default_str();
  analyze->add_option("--graph", an_graph, "labeled graph file: botnet vs full graph");
  analyze->add_option("--edges", an_edges, "plain edge list");
  analyze->add_option("--tol", aopt.analysis.spectral.tol)->capture_default_str();
  analyze->add_option("--max-iters", aopt.analysis.spectral.max_iters)->capture_default_str();
  analyze->add_option("--lambda2-mode", l2_mode, "signed or absolute")->capture_default_str();
  analyze->add_option("--path-samples", aopt.analysis.paths.sample_size)->capture_default_str();
  analyze->add_option("--exact-threshold", aopt.analysis.paths.exact_threshold)
      ->capture_default_str();
  analyze->add_option("--out", an_out, "directory for report files");
  analyze->callback([&] {
    action = [&](std::string run_config) {
      if (!an_graph.empty()) aopt.graph = an_graph;
      if (!an_edges.empty()) aopt.edges = an_edges;
      if (!an_out.empty()) aopt.out = an_out;
      if (l2_mode == "absolute") {
        aopt.analysis.spectral.mode = analysis::Lambda2Mode::kAbsolute;
      } else if (l2_mode != "signed") {
        throw ConfigError("unknown --lambda2-mode '" + l2_mode + "' (expected signed or absolute)");
      }
      aopt.analysis.paths.seed = aopt.seed;
      aopt.run_config = std::move(run_config);
      cli::cmd_analyze(aopt, std::cout, std::cerr);
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "test F1 against depth over several seeds");
  cli::SweepOptions sopt;
  TrainFlags sweep_flags;
  std::vector<std::string> sweep_data;
  std::string sweep_out;
  sweep->add_option("--data", sweep_data, "dataset directory (repeatable)")->required();
  sweep->add_option("--layers", sopt.layers, "comma-separated depths")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--seeds", sopt.seeds, "runs per cell")->capture_default_str();
  sweep->add_option("--seed", sopt.base_seed, "first seed")->capture_default_str();
  sweep->add_option("--hidden", sopt.hidden)->capture_default_str();
  sweep->add_option("--out", sweep_out, "sweep directory")->required();
  add_train_flags(sweep, sweep_flags);
  sweep->callback([&] {
    action = [&](std::string run_config) {
      for (const auto& d : sweep_data) sopt.data.emplace_back(d);
      sopt.out = sweep_out;
      sopt.normalization = parse_normalization(sweep_flags.normalization);
      sopt.train = resolve(sweep_flags);
      sopt.run_config = std::move(run_config);
      cli::cmd_sweep(sopt, std::cout, std::cerr);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfig;
  }

  const CLI::App* invoked = app.get_subcommands().front();
  return cli::run_guarded(
      [&] {
        if (invoked == gen) {
          const auto kind = topo::parse_topology(topology);
          if (preset == "full") {
            const auto p = topo::full_preset(kind, dcfg.seed);
            record_resolved(o_nbg, p.n_background);
            record_resolved(o_deg, p.avg_degree);
            record_resolved(o_bots, p.bots);
            record_resolved(o_graphs, std::to_string(p.graphs.train) + "," +
                                          std::to_string(p.graphs.val) + "," +
                                          std::to_string(p.graphs.test));
          }
        }
        action(run_config_text(app, invoked));
      },
      std::cerr);
}
