// Command-line surface for the directed-graph spectral pipeline:
//   preprocess  feature-aware merge, stationary vector, propagation operators
//   train       node-classification models over preprocessed artifacts
//   verify      oracle cross-check suite, JSON report
//   synth       planted-partition dataset generator
//
// Exit codes: 0 ok; 1 failed verification; 2 parse/format error;
// 3 precondition violation; 4 missing artifacts.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgl/binio.hpp"
#include "dgl/data.hpp"
#include "dgl/fpr.hpp"
#include "dgl/graph.hpp"
#include "dgl/jsonschema.hpp"
#include "dgl/markov.hpp"
#include "dgl/model.hpp"
#include "dgl/oracle.hpp"
#include "dgl/svd.hpp"
#include "dgl/threading.hpp"
#include "dgl/types.hpp"
#include "dgl/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kFormatVersion = "DGL1";

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitMissingArtifacts = 4;

int exit_code_for(const dgl::Error& e) {
  switch (e.code()) {
    case dgl::ErrorCode::ParseError:
    case dgl::ErrorCode::IoError:
    case dgl::ErrorCode::InconsistentCounts:
      return kExitParse;
    default:
      return kExitPrecondition;
  }
}

struct PreprocessArgs {
  std::string edges, features, labels, splits;
  std::string out_dir;
  dgl::Index k = 2;
  std::uint64_t seed = 0;
  bool commute = false;
  double mu = 0.97;
  std::string variant = "fpr";
  double pr_alpha = 0.85;
  int power_iters = 30;
  double tol = 1e-10;
};

struct PipelineArtifacts {
  dgl::fpr::CombinatorialGraph cg;
  dgl::markov::PfprChain chain;
  dgl::SparseMatrix propagation;  // directed operator for the model layer
};

// Feature-aware (or variant) preprocessing entirely in memory.
PipelineArtifacts run_pipeline(const dgl::DiGraph& g,
                               const PreprocessArgs& args) {
  PipelineArtifacts out;
  if (args.variant == "fpr") {
    out.cg = dgl::fpr::build_combinatorial(g, args.k, args.seed);
  } else if (args.variant == "knn") {
    out.cg = dgl::fpr::knn_combine(g, args.k);
  } else if (args.variant == "wofeat") {
    // Feature-independent route: classical PageRank smoothing of the
    // self-loop-augmented original graph.
    dgl::SparseMatrix loops = dgl::add_self_loops(g.adj);
    dgl::DenseMatrix pr = dgl::markov::pagerank_transition(
        dgl::row_normalize(loops), args.pr_alpha);
    out.cg.merged = g.adj;
    out.cg.merged_loops = loops;
    out.cg.degrees = dgl::out_degrees(loops);
    out.cg.transition = dgl::SparseMatrix::from_dense(pr);
    out.cg.k = args.k;
    out.cg.seed = args.seed;
  } else {
    throw dgl::Error(dgl::ErrorCode::InvalidArgument,
                     "unknown variant: " + args.variant);
  }
  out.chain = dgl::markov::make_chain(out.cg, args.power_iters, args.tol);
  out.propagation = dgl::markov::augmented_propagation_sparse(out.chain);
  return out;
}

int cmd_preprocess(const PreprocessArgs& args) {
  if (args.k <= 0 || args.k % 2 != 0) {
    std::cerr << "preprocess: --k must be a positive even number\n";
    return kExitPrecondition;
  }
  if (args.variant != "fpr" && args.variant != "knn" &&
      args.variant != "wofeat") {
    std::cerr << "preprocess: unknown --variant " << args.variant << "\n";
    return kExitParse;
  }
  auto ds = dgl::data::load_dataset(args.edges, args.features, args.labels,
                                    args.splits);
  PipelineArtifacts artifacts = run_pipeline(ds.graph, args);

  fs::create_directories(args.out_dir);
  auto path = [&](const char* name) {
    return (fs::path(args.out_dir) / name).string();
  };
  dgl::write_sparse(path("merged.dgl1"), artifacts.cg.merged);
  dgl::write_sparse(path("transition.dgl1"), artifacts.cg.transition);
  dgl::write_vector(path("degrees.dgl1"), artifacts.cg.degrees);
  dgl::write_vector(path("stationary.dgl1"), artifacts.chain.stationary);
  dgl::write_sparse(path("propagation.dgl1"), artifacts.propagation);

  json manifest;
  manifest["tool"] = "dgl";
  manifest["tool_version"] = kToolVersion;
  manifest["format_version"] = kFormatVersion;
  manifest["variant"] = args.variant;
  manifest["k"] = artifacts.cg.k;
  manifest["window_size"] = artifacts.cg.window_size;
  manifest["seed"] = args.seed;
  manifest["power_iterations"] = args.power_iters;
  manifest["tolerance"] = args.tol;
  manifest["residual"] = artifacts.chain.residual;
  manifest["iterations_used"] = artifacts.chain.iterations_used;
  manifest["converged"] = artifacts.chain.converged;
  manifest["n"] = ds.graph.n;
  manifest["edges"] = ds.graph.num_edges();
  manifest["duplicate_edges_dropped"] = ds.duplicate_edges_dropped;
  manifest["self_loops_dropped"] = ds.self_loops_dropped;
  manifest["nnz_transition"] = artifacts.cg.transition.nnz();
  manifest["inputs"] = {{"edges", args.edges},
                        {"features", args.features},
                        {"labels", args.labels},
                        {"splits", args.splits}};
  std::vector<std::string> names = {"merged.dgl1", "transition.dgl1",
                                    "degrees.dgl1", "stationary.dgl1",
                                    "propagation.dgl1"};

  if (args.commute) {
    auto model = dgl::markov::build_commute_model(artifacts.chain, args.mu);
    dgl::write_dense(path("fundamental.dgl1"), model.fundamental);
    dgl::write_dense(path("hitting.dgl1"), model.hitting);
    dgl::write_dense(path("commute.dgl1"), model.commute);
    dgl::write_sparse(path("commute_propagation.dgl1"), model.propagation);
    manifest["mu"] = args.mu;
    names.insert(names.end(), {"fundamental.dgl1", "hitting.dgl1",
                               "commute.dgl1", "commute_propagation.dgl1"});
  }
  manifest["artifacts"] = names;
  std::ofstream out(path("manifest.json"));
  out << manifest.dump(2) << '\n';

  std::cout << "preprocess: n=" << ds.graph.n
            << " |E|=" << ds.graph.num_edges()
            << " nnz(P)=" << artifacts.cg.transition.nnz()
            << " residual=" << artifacts.chain.residual << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string artifacts_dir;
  std::string model = "diglacian";
  double lr = 0.01;
  double weight_decay = 5e-4;
  int hidden = 64;
  double dropout = 0.5;
  int patience = 500;
  int max_epochs = 1000;
  int layers = 2;
  int split_index = -1;
  std::uint64_t seed = 0;
  std::string out = "metrics.json";
  std::string sweep_k;
  std::string sweep_out = "sweep.csv";
};

json load_manifest(const std::string& dir) {
  fs::path p = fs::path(dir) / "manifest.json";
  if (!fs::exists(p))
    throw dgl::Error(dgl::ErrorCode::IoError,
                     "missing artifacts: " + p.string());
  std::ifstream in(p);
  json j;
  in >> j;
  return j;
}

struct LoadedArtifacts {
  dgl::data::Dataset dataset;
  dgl::fpr::CombinatorialGraph cg;
  dgl::markov::PfprChain chain;
  dgl::SparseMatrix propagation;
  dgl::SparseMatrix commute_propagation;  // empty unless present on disk
};

LoadedArtifacts load_artifacts(const std::string& dir, bool need_commute) {
  json manifest = load_manifest(dir);
  auto path = [&](const char* name) {
    fs::path p = fs::path(dir) / name;
    if (!fs::exists(p))
      throw dgl::Error(dgl::ErrorCode::IoError,
                       "missing artifact: " + p.string());
    return p.string();
  };
  LoadedArtifacts a;
  const auto& inputs = manifest["inputs"];
  a.dataset = dgl::data::load_dataset(
      inputs["edges"].get<std::string>(),
      inputs["features"].get<std::string>(),
      inputs["labels"].get<std::string>(),
      inputs.value("splits", std::string{}));
  a.cg.merged = dgl::read_sparse(path("merged.dgl1"));
  a.cg.merged_loops = dgl::add_self_loops(a.cg.merged);
  a.cg.transition = dgl::read_sparse(path("transition.dgl1"));
  a.cg.degrees = dgl::read_vector(path("degrees.dgl1"));
  a.cg.k = manifest["k"].get<dgl::Index>();
  a.chain.transition = a.cg.transition;
  a.chain.degrees = a.cg.degrees;
  a.chain.stationary = dgl::read_vector(path("stationary.dgl1"));
  a.chain.residual = manifest["residual"].get<double>();
  a.chain.iterations_used = manifest["iterations_used"].get<int>();
  a.propagation = dgl::read_sparse(path("propagation.dgl1"));
  if (need_commute)
    a.commute_propagation = dgl::read_sparse(path("commute_propagation.dgl1"));
  return a;
}

dgl::gnn::PropagationSet props_from_artifacts(dgl::gnn::ModelKind kind,
                                              const LoadedArtifacts& a) {
  dgl::markov::CommuteModel commute;
  commute.propagation = a.commute_propagation;
  return dgl::gnn::build_propagation(
      kind, a.dataset.graph, a.cg, a.chain,
      kind == dgl::gnn::ModelKind::DiglacianCt ? &commute : nullptr);
}

json train_over_splits(dgl::gnn::ModelKind kind, const LoadedArtifacts& a,
                       const dgl::gnn::PropagationSet& props,
                       const TrainArgs& args, double* mean_out = nullptr) {
  const auto& splits = a.dataset.splits;
  if (splits.empty())
    throw dgl::Error(dgl::ErrorCode::IoError,
                     "dataset provides no splits; run synth or supply a "
                     "splits file");
  std::vector<int> selected;
  if (args.split_index >= 0) {
    if (args.split_index >= static_cast<int>(splits.size()))
      throw dgl::Error(dgl::ErrorCode::InvalidArgument,
                       "--split-index out of range");
    selected.push_back(args.split_index);
  } else {
    for (int i = 0; i < static_cast<int>(splits.size()); ++i)
      selected.push_back(i);
  }

  dgl::gnn::TrainConfig config;
  config.layers = args.layers;
  config.hidden = args.hidden;
  config.lr = args.lr;
  config.weight_decay = args.weight_decay;
  config.dropout = args.dropout;
  config.patience = args.patience;
  config.max_epochs = args.max_epochs;

  json split_metrics = json::array();
  std::vector<double> accs;
  json alpha_traj, beta_traj;
  for (int idx : selected) {
    const auto& sp = splits[idx];
    config.seed = args.seed + 0x100000001ULL * static_cast<std::uint64_t>(idx);
    auto result = dgl::gnn::train(kind, a.dataset.graph.features, props,
                                  a.dataset.labels, sp.train, sp.val, config);
    double test_acc = dgl::gnn::evaluate(result.best, a.dataset.graph.features,
                                         props, a.dataset.labels, sp.test);
    accs.push_back(test_acc);
    json m;
    m["split"] = idx;
    m["test_accuracy"] = test_acc;
    m["val_accuracy"] = result.best_val_acc;
    m["best_epoch"] = result.best_epoch;
    m["epochs_run"] = result.history.size();
    m["alpha"] = result.best.alpha;
    m["beta"] = result.best.beta;
    split_metrics.push_back(m);
    if (idx == selected.front()) {
      for (const auto& st : result.history) {
        alpha_traj.push_back(st.alpha);
        beta_traj.push_back(st.beta);
      }
    }
  }
  double mean = 0.0;
  for (double v : accs) mean += v;
  mean /= accs.size();
  double var = 0.0;
  for (double v : accs) var += (v - mean) * (v - mean);
  double stddev = accs.size() > 1 ? std::sqrt(var / (accs.size() - 1)) : 0.0;
  if (mean_out != nullptr) *mean_out = mean;

  json out;
  out["splits"] = split_metrics;
  out["mean_test_accuracy"] = mean;
  out["std_test_accuracy"] = stddev;
  out["alpha_trajectory"] = alpha_traj;
  out["beta_trajectory"] = beta_traj;
  return out;
}

int cmd_train(const TrainArgs& args) {
  auto t0 = std::chrono::steady_clock::now();
  dgl::gnn::ModelKind kind = dgl::gnn::model_kind_from_string(args.model);
  LoadedArtifacts a = load_artifacts(
      args.artifacts_dir, kind == dgl::gnn::ModelKind::DiglacianCt);

  json metrics;
  metrics["model"] = args.model;
  metrics["config"] = {{"lr", args.lr},
                       {"weight_decay", args.weight_decay},
                       {"hidden", args.hidden},
                       {"dropout", args.dropout},
                       {"patience", args.patience},
                       {"max_epochs", args.max_epochs},
                       {"layers", args.layers},
                       {"seed", args.seed}};

  auto props = props_from_artifacts(kind, a);
  metrics.update(train_over_splits(kind, a, props, args));

  if (!args.sweep_k.empty()) {
    // accuracy-vs-k sweep; rebuilds the merge for each k from the inputs
    json manifest = load_manifest(args.artifacts_dir);
    PreprocessArgs pre;
    pre.edges = manifest["inputs"]["edges"].get<std::string>();
    pre.features = manifest["inputs"]["features"].get<std::string>();
    pre.labels = manifest["inputs"]["labels"].get<std::string>();
    pre.seed = manifest["seed"].get<std::uint64_t>();
    pre.variant = manifest.value("variant", "fpr");
    pre.power_iters = manifest["power_iterations"].get<int>();
    pre.tol = manifest["tolerance"].get<double>();
    pre.mu = manifest.value("mu", 0.97);

    std::ofstream csv(args.sweep_out);
    csv << "k,split,test_accuracy\n";
    std::stringstream ss(args.sweep_k);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      pre.k = std::stoll(tok);
      PipelineArtifacts pipe = run_pipeline(a.dataset.graph, pre);
      LoadedArtifacts ak = a;
      ak.cg = pipe.cg;
      ak.chain = pipe.chain;
      ak.propagation = pipe.propagation;
      if (kind == dgl::gnn::ModelKind::DiglacianCt) {
        auto cm = dgl::markov::build_commute_model(pipe.chain, pre.mu);
        ak.commute_propagation = cm.propagation;
      }
      auto props_k = props_from_artifacts(kind, ak);
      double mean = 0.0;
      json res = train_over_splits(kind, ak, props_k, args, &mean);
      for (const auto& m : res["splits"])
        csv << pre.k << ',' << m["split"].get<int>() << ','
            << m["test_accuracy"].get<double>() << '\n';
      csv << pre.k << ",-1," << mean << '\n';  // split -1 = mean over splits
    }
    metrics["sweep_csv"] = args.sweep_out;
  }

  auto t1 = std::chrono::steady_clock::now();
  metrics["wall_time_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  std::ofstream out(args.out);
  if (!out)
    throw dgl::Error(dgl::ErrorCode::IoError, "cannot write " + args.out);
  out << metrics.dump(2) << '\n';
  std::cout << "train: model=" << args.model
            << " mean_test_accuracy=" << metrics["mean_test_accuracy"]
            << " (" << metrics["splits"].size() << " splits)\n";
  return kExitOk;
}

int cmd_verify(std::uint64_t seed, const std::string& out_path,
               bool inject_perturbation) {
  dgl::verify::Options opts;
  opts.seed = seed;
  opts.inject_pi_perturbation = inject_perturbation;
  auto report = dgl::verify::run_suite(opts);

  json j;
  j["checks"] = json::array();
  for (const auto& check : report.checks) {
    j["checks"].push_back({{"name", check.name},
                           {"pass", check.pass},
                           {"residual", check.residual},
                           {"details", check.details}});
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << "  ("
              << check.details << ")\n";
  }
  j["all_pass"] = report.all_pass;
  j["theorem31_max_residual"] = report.theorem31_max_residual;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << j.dump(2) << '\n';
  }
  std::cout << (report.all_pass ? "verify: all checks passed\n"
                                : "verify: FAILURES detected\n");
  return report.all_pass ? kExitOk : kExitVerifyFailed;
}

struct SynthArgs {
  dgl::data::SynthConfig cfg;
  std::string out_dir;
  int n_splits = 10;
};

int cmd_synth(const SynthArgs& args) {
  auto ds = dgl::data::generate_synthetic(args.cfg);
  ds.splits = dgl::data::make_splits(ds.labels, {0.48, 0.32, 0.20},
                                     args.n_splits, args.cfg.seed);
  fs::create_directories(args.out_dir);
  auto path = [&](const char* name) {
    return (fs::path(args.out_dir) / name).string();
  };
  dgl::data::save_dataset(ds, path("edges.tsv"), path("features.tsv"),
                          path("labels.tsv"), path("splits.json"));
  double h = dgl::data::edge_homophily(ds.graph, ds.labels);

  json manifest;
  manifest["tool"] = "dgl";
  manifest["tool_version"] = kToolVersion;
  manifest["n"] = args.cfg.n;
  manifest["classes"] = args.cfg.classes;
  manifest["target_homophily"] = args.cfg.homophily;
  manifest["measured_homophily"] = h;
  manifest["mean_degree"] = args.cfg.mean_degree;
  manifest["dim"] = args.cfg.dim;
  manifest["snr"] = args.cfg.snr;
  manifest["seed"] = args.cfg.seed;
  manifest["splits"] = args.n_splits;
  manifest["edges"] = ds.graph.num_edges();
  std::ofstream out(path("manifest.json"));
  out << manifest.dump(2) << '\n';
  std::cout << "synth: n=" << args.cfg.n << " |E|=" << ds.graph.num_edges()
            << " measured_h=" << h << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"directed-graph spectral toolkit"};
  app.require_subcommand(1);

  bool deterministic = false;
  app.add_flag("--deterministic", deterministic,
               "force sequential numeric kernels (DGL_THREADS=1)");

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand(
      "preprocess", "build the feature-aware merge and spectral operators");
  preprocess->add_option("--edges", pre.edges, "edge TSV (src<TAB>dst)")
      ->required();
  preprocess->add_option("--features", pre.features, "feature TSV")
      ->required();
  preprocess->add_option("--labels", pre.labels, "label TSV")->required();
  preprocess->add_option("--splits", pre.splits, "splits JSON (optional)");
  preprocess->add_option("--k", pre.k, "neighbors per node, even (default 2)");
  preprocess->add_option("--seed", pre.seed, "auxiliary-vector seed");
  preprocess->add_option("--out-dir", pre.out_dir, "artifact directory")
      ->required();
  preprocess->add_flag("--commute", pre.commute,
                       "also derive commute-time operators");
  preprocess->add_option("--mu", pre.mu, "sparsification ratio (default .97)");
  preprocess->add_option("--variant", pre.variant,
                         "fpr | knn | wofeat (default fpr)");
  preprocess->add_option("--pr-alpha", pre.pr_alpha,
                         "damping for the wofeat variant");
  preprocess->add_option("--power-iters", pre.power_iters,
                         "power-iteration budget (default 30)");
  preprocess->add_option("--tol", pre.tol, "power-iteration tolerance");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train a node classifier");
  train->add_option("--artifacts", tr.artifacts_dir, "preprocess output dir")
      ->required();
  train->add_option("--model", tr.model,
                    "diglacian | diglacian-ct | adasage | gcn | mlp");
  train->add_option("--lr", tr.lr, "learning rate (default 0.01)");
  train->add_option("--weight-decay", tr.weight_decay, "l2 penalty");
  train->add_option("--hidden", tr.hidden, "hidden width (default 64)");
  train->add_option("--dropout", tr.dropout, "dropout rate (default 0.5)");
  train->add_option("--patience", tr.patience, "early-stopping patience");
  train->add_option("--max-epochs", tr.max_epochs, "epoch cap");
  train->add_option("--layers", tr.layers, "layer count (default 2)");
  train->add_option("--split-index", tr.split_index,
                    "train a single split (-1 = all)");
  train->add_option("--seed", tr.seed, "training seed");
  train->add_option("--out", tr.out, "metrics JSON path");
  train->add_option("--sweep-k", tr.sweep_k,
                    "comma-separated k values for an accuracy sweep");
  train->add_option("--sweep-out", tr.sweep_out, "sweep CSV path");

  std::uint64_t verify_seed = 1;
  std::string verify_out;
  bool inject = false;
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  verify->add_option("--seed", verify_seed, "instance seed");
  verify->add_option("--out", verify_out, "report JSON path");
  verify->add_flag("--inject-pi-perturbation", inject,
                   "negative-control hook: corrupt the stationary vector");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--n", sy.cfg.n, "node count")->required();
  synth->add_option("--classes", sy.cfg.classes, "class count")->required();
  synth->add_option("--homophily", sy.cfg.homophily, "target edge homophily")
      ->required();
  synth->add_option("--mean-degree", sy.cfg.mean_degree, "mean out-degree");
  synth->add_option("--dim", sy.cfg.dim, "feature dimension");
  synth->add_option("--snr", sy.cfg.snr, "class-mean strength");
  synth->add_option("--seed", sy.cfg.seed, "generator seed");
  synth->add_option("--out-dir", sy.out_dir, "output directory")->required();
  synth->add_option("--splits", sy.n_splits, "number of splits (default 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (deterministic) ::setenv("DGL_THREADS", "1", 1);

  try {
    if (preprocess->parsed()) return cmd_preprocess(pre);
    if (train->parsed()) return cmd_train(tr);
    if (verify->parsed()) return cmd_verify(verify_seed, verify_out, inject);
    if (synth->parsed()) return cmd_synth(sy);
  } catch (const dgl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (train->parsed() && e.code() == dgl::ErrorCode::IoError)
      return kExitMissingArtifacts;
    if (synth->parsed()) return kExitParse;
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitOk;
}
