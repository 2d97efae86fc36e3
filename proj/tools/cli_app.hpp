#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "esgea/esgea.hpp"

namespace esgea::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

namespace fs = std::filesystem;
using nlohmann::json;

/// Wall-clock seconds per named stage, in insertion order.
class StageTimer {
 public:
  template <typename F>
  auto time(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, start);
    } else {
      auto result = f();
      record(stage, start);
      return result;
    }
  }

  json to_json() const {
    json j = json::array();
    for (const auto& [name, secs] : stages_) j.push_back({{"stage", name}, {"seconds", secs}});
    return j;
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    stages_.emplace_back(stage, d.count());
  }

  std::vector<std::pair<std::string, double>> stages_;
};

/// Everything needed to re-run a command: argv, resolved parameters, paths
/// and timings. Written atomically next to the primary output.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  json parameters = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  StageTimer timer;

  void write(const fs::path& primary_output) const {
    json j = {{"command", command},
              {"version", kVersion},
              {"argv", argv},
              {"parameters", parameters},
              {"seeds", seeds},
              {"inputs", inputs},
              {"outputs", outputs},
              {"timings", timer.to_json()}};
    auto path = primary_output;
    path += ".manifest.json";
    io::write_file_atomic(path, j.dump(2) + "\n");
  }
};

/// Descriptor flags shared by embed, train-node, train-graph and bench.
struct DescriptorFlags {
  std::string kernel = "heat";
  std::size_t dim = 20;
  double t_min = 1e-2;
  double t_max = 1e2;
  std::string laplacian = "unnormalized";
  std::string normalization = "none";
  std::string approximation = "auto";
  std::size_t approx_threshold = 1024;
  std::size_t extreme_count = 100;

  void add_to(CLI::App& app) {
    app.add_option("--kernel", kernel, "heat | wave")->capture_default_str();
    app.add_option("--dim", dim, "descriptor dimension (time grid size)")->capture_default_str();
    app.add_option("--t_min,--t-min", t_min, "smallest time point")->capture_default_str();
    app.add_option("--t_max,--t-max", t_max, "largest time point")->capture_default_str();
    app.add_option("--laplacian", laplacian, "unnormalized | normalized")->capture_default_str();
    app.add_option("--normalization", normalization, "none | by-node-count")->capture_default_str();
    app.add_option("--approximation", approximation, "auto | exact | extreme")->capture_default_str();
    app.add_option("--approx_threshold,--approx-threshold", approx_threshold,
                   "subgraph size above which auto mode approximates")
        ->capture_default_str();
    app.add_option("--extreme_count,--extreme-count", extreme_count, "number of extreme eigenvalues (even)")
        ->capture_default_str();
  }

  DescriptorConfig resolve() const {
    DescriptorConfig c;
    c.kernel = parse_kernel(kernel);
    c.grid = default_time_grid(dim, t_min, t_max);
    c.laplacian = parse_laplacian_variant(laplacian);
    c.normalization = parse_normalization(normalization);
    c.approximation = parse_approximation(approximation);
    c.approx_threshold = approx_threshold;
    c.extreme_count = extreme_count;
    c.validate();
    return c;
  }

  json to_json() const {
    return {{"kernel", kernel},
            {"dim", dim},
            {"t_min", t_min},
            {"t_max", t_max},
            {"laplacian", laplacian},
            {"normalization", normalization},
            {"approximation", approximation},
            {"approx_threshold", approx_threshold},
            {"extreme_count", extreme_count}};
  }
};

struct MpnnFlags {
  gnn::MpnnConfig config;
  std::string aggregator = "gcn";
  std::string readout = "mean";

  explicit MpnnFlags(gnn::MpnnConfig defaults) : config(defaults) {}

  void add_to(CLI::App& app) {
    app.add_option("--layers", config.num_layers, "message-passing layers")->capture_default_str();
    app.add_option("--hidden", config.hidden_dim, "hidden channels")->capture_default_str();
    app.add_option("--aggregator", aggregator, "gcn | mean | sum | max")->capture_default_str();
    app.add_option("--readout", readout, "mean | sum (graph task)")->capture_default_str();
    app.add_option("--lr", config.learning_rate, "learning rate")->capture_default_str();
    app.add_option("--weight_decay,--weight-decay", config.weight_decay, "L2 weight decay")->capture_default_str();
    app.add_option("--epochs", config.epochs, "maximum epochs")->capture_default_str();
    app.add_option("--patience", config.patience, "early-stopping patience")->capture_default_str();
    app.add_option("--batch_size,--batch-size", config.batch_size, "graphs per minibatch")->capture_default_str();
  }

  gnn::MpnnConfig resolve(std::uint64_t seed) const {
    auto c = config;
    c.aggregator = gnn::parse_aggregator(aggregator);
    c.readout = gnn::parse_readout(readout);
    c.seed = seed;
    c.validate();
    return c;
  }

  json to_json() const {
    return {{"layers", config.num_layers},    {"hidden", config.hidden_dim},       {"aggregator", aggregator},
            {"readout", readout},             {"lr", config.learning_rate},        {"weight_decay", config.weight_decay},
            {"epochs", config.epochs},        {"patience", config.patience},       {"batch_size", config.batch_size}};
  }
};

/// Node labels: one per line, either `label` or `id,label` (ids 0..n-1 in order).
inline std::vector<int> load_node_labels(const fs::path& path) {
  auto in = io::detail::open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = io::detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto toks = io::detail::tokens(body);
    int label = 0;
    long long id = 0;
    const bool ok = toks.size() == 1 ? io::detail::parse_number(toks[0], label)
                                     : toks.size() == 2 && io::detail::parse_number(toks[0], id) &&
                                           io::detail::parse_number(toks[1], label) &&
                                           id == static_cast<long long>(labels.size());
    if (!ok) {
      if (lineno == 1 && labels.empty()) continue;  // header
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed label row");
    }
    labels.push_back(label);
  }
  if (labels.empty()) throw DataError(path.string() + ": no labels");
  return labels;
}

inline void write_node_labels(const fs::path& path, std::span<const int> labels) {
  auto out = io::detail::open_out(path);
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

struct SeedSummary {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation.
inline SeedSummary summarize(const std::vector<double>& v) {
  SeedSummary s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

/// Per-seed runs plus aggregate; the top-level test_metric is the mean.
inline json multi_seed_metrics(std::string_view task, std::string_view metric_name, const std::vector<json>& runs,
                               const std::vector<double>& metrics) {
  const auto s = summarize(metrics);
  json j = runs.front();
  j["task"] = task;
  j["metric"] = metric_name;
  j["test_metric"] = s.mean;
  j["runs"] = runs;
  j["aggregate"] = {{"mean", s.mean}, {"std", s.std}, {"count", metrics.size()}};
  return j;
}

/// Entry point. Returns a process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Ego-centric spectral subgraph embeddings and a minimal GNN trainer", "esgea"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");

  RunManifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);
  std::function<void()> action;

  // embed ------------------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "ego-subgraph spectral embedding of every node");
  fs::path embed_graph;
  fs::path embed_out;
  bool embed_directed = false;
  std::size_t embed_k = 3;
  std::size_t threads = default_thread_count();
  std::size_t max_ball = 0;
  DescriptorFlags embed_desc;
  embed->add_option("--graph", embed_graph, "edge-list file")->required();
  embed->add_option("--out", embed_out, "output (.csv with node ids, or .bin)")->required();
  embed->add_flag("--directed", embed_directed, "input rows are directed arcs (symmetrized)");
  embed->add_option("--k", embed_k, "subgraph depth (>= 1)")->capture_default_str();
  embed->add_option("--threads", threads, "worker threads")->capture_default_str();
  embed->add_option("--max_ball,--max-ball", max_ball, "reject balls above this size (0 = no cap)");
  embed_desc.add_to(*embed);
  embed->callback([&] {
    action = [&] {
      manifest.command = "embed";
      const auto cfg = embed_desc.resolve();
      validate_hops(embed_k);
      const auto g = manifest.timer.time("load", [&] { return io::load_edge_list(embed_graph, embed_directed); });
      EmbedOptions opts{threads, max_ball ? std::optional<std::size_t>(max_ball) : std::nullopt};
      const auto phi = manifest.timer.time("embed", [&] { return embed_subgraphs(g, embed_k, cfg, opts); });
      manifest.timer.time("write", [&] { io::save_features(embed_out, phi, true); });
      manifest.parameters = embed_desc.to_json();
      manifest.parameters["k"] = embed_k;
      manifest.parameters["directed"] = embed_directed;
      manifest.parameters["threads"] = threads;
      manifest.parameters["max_ball"] = max_ball;
      manifest.inputs = {embed_graph.string()};
      manifest.outputs = {embed_out.string()};
      manifest.write(embed_out);
      out << "embedded " << g.num_nodes() << " nodes (dim " << cfg.dim() << ") -> " << embed_out.string() << '\n';
    };
  });

  // augment ----------------------------------------------------------------
  auto* augment = app.add_subcommand("augment", "combine node features with embeddings");
  fs::path aug_features;
  fs::path aug_embedding;
  fs::path aug_out;
  std::string aug_mode = "concat";
  augment->add_option("--features", aug_features, "feature matrix (.csv or .bin)")->required();
  augment->add_option("--embedding", aug_embedding, "embedding file from `embed`")->required();
  augment->add_option("--mode", aug_mode, "concat | mean | max | min | sum | replace")->capture_default_str();
  augment->add_option("--out", aug_out, "output feature matrix")->required();
  augment->callback([&] {
    action = [&] {
      manifest.command = "augment";
      const auto mode = parse_aggregation(aug_mode);
      const auto x = manifest.timer.time("load", [&] { return io::load_features(aug_features); });
      const auto phi = io::load_features(aug_embedding, true);
      const auto combined = manifest.timer.time("aggregate", [&] { return aggregate(x, phi, mode); });
      io::save_features(aug_out, combined);
      manifest.parameters = {{"mode", aug_mode}};
      manifest.inputs = {aug_features.string(), aug_embedding.string()};
      manifest.outputs = {aug_out.string()};
      manifest.write(aug_out);
      out << "wrote " << combined.rows() << "x" << combined.cols() << " -> " << aug_out.string() << '\n';
    };
  });

  // corrupt ----------------------------------------------------------------
  auto* corrupt = app.add_subcommand("corrupt", "replace a fraction of feature rows with Gaussian noise");
  fs::path cor_features;
  fs::path cor_out;
  double cor_ratio = 0.0;
  std::uint64_t cor_seed = 0;
  corrupt->add_option("--features", cor_features, "feature matrix (.csv or .bin)")->required();
  corrupt->add_option("--ratio", cor_ratio, "fraction of rows to replace")->required()->check(CLI::Range(0.0, 1.0));
  corrupt->add_option("--seed", cor_seed, "random seed")->capture_default_str();
  corrupt->add_option("--out", cor_out, "output feature matrix; ids go to <out>.corrupted.txt")->required();
  corrupt->callback([&] {
    action = [&] {
      manifest.command = "corrupt";
      const auto x = io::load_features(cor_features);
      const auto res = manifest.timer.time("corrupt", [&] { return corrupt_features(x, {cor_ratio, cor_seed}); });
      io::save_features(cor_out, res.features);
      auto sidecar = cor_out;
      sidecar += ".corrupted.txt";
      std::string ids;
      for (auto v : res.corrupted) ids += std::to_string(v) + '\n';
      io::write_file_atomic(sidecar, ids);
      manifest.parameters = {{"ratio", cor_ratio}};
      manifest.seeds = {cor_seed};
      manifest.inputs = {cor_features.string()};
      manifest.outputs = {cor_out.string(), sidecar.string()};
      manifest.write(cor_out);
      out << "corrupted " << res.corrupted.size() << " of " << x.rows() << " rows -> " << cor_out.string() << '\n';
    };
  });

  // train-node -------------------------------------------------------------
  auto* tnode = app.add_subcommand("train-node", "node classification with the mini-MPNN");
  fs::path tn_graph;
  fs::path tn_labels;
  fs::path tn_features;
  fs::path tn_out;
  fs::path tn_model_out;
  std::string tn_source = "raw";
  std::string tn_mode = "concat";
  double tn_corrupt = 0.0;
  std::size_t tn_k = 3;
  std::size_t tn_seeds = 1;
  std::uint64_t tn_seed = 0;
  DescriptorFlags tn_desc;
  MpnnFlags tn_mpnn(gnn::MpnnConfig::node_defaults());
  tnode->add_option("--graph", tn_graph, "edge-list file")->required();
  tnode->add_option("--labels", tn_labels, "node labels (`label` or `id,label` per line)")->required();
  tnode->add_option("--features", tn_features, "explicit node features (.csv / .bin)");
  tnode->add_option("--source", tn_source, "raw | esgea | degree")->capture_default_str();
  tnode->add_option("--mode", tn_mode, "aggregation of raw features with embeddings (esgea source)")
      ->capture_default_str();
  tnode->add_option("--corrupt", tn_corrupt, "fraction of raw feature rows replaced by noise")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tnode->add_option("--k", tn_k, "subgraph depth")->capture_default_str();
  tnode->add_option("--seeds", tn_seeds, "number of seeded repetitions")->capture_default_str();
  tnode->add_option("--seed", tn_seed, "first seed")->capture_default_str();
  tnode->add_option("--threads", threads, "embedding worker threads")->capture_default_str();
  tnode->add_option("--out", tn_out, "metrics JSON")->required();
  tnode->add_option("--model_out,--model-out", tn_model_out, "model file of the first seed");
  tn_desc.add_to(*tnode);
  tn_mpnn.add_to(*tnode);
  tnode->callback([&] {
    action = [&] {
      manifest.command = "train-node";
      if (tn_seeds < 1) throw InvalidArgument("--seeds must be >= 1");
      const auto g = manifest.timer.time("load", [&] { return io::load_edge_list(tn_graph); });
      const auto labels = load_node_labels(tn_labels);
      if (labels.size() != g.num_nodes()) {
        throw DataError("labels file has " + std::to_string(labels.size()) + " rows for " +
                        std::to_string(g.num_nodes()) + " nodes");
      }
      std::optional<FeatureMatrix> raw;
      if (!tn_features.empty()) raw = io::load_features(tn_features);
      if (tn_source == "raw" && !raw) throw InvalidArgument("--source raw needs --features");
      std::optional<FeatureMatrix> phi;
      if (tn_source == "esgea") {
        const auto cfg = tn_desc.resolve();
        phi = manifest.timer.time("embed", [&] { return embed_subgraphs(g, tn_k, cfg, {threads, std::nullopt}); });
      } else if (tn_source != "raw" && tn_source != "degree") {
        throw InvalidArgument("unknown --source '" + tn_source + "'");
      }
      const auto mode = parse_aggregation(tn_mode);

      std::vector<json> runs;
      std::vector<double> metrics;
      manifest.timer.time("train", [&] {
        for (std::size_t s = 0; s < tn_seeds; ++s) {
          const std::uint64_t seed = tn_seed + s;
          manifest.seeds.push_back(seed);
          FeatureMatrix x;
          if (tn_source == "degree") {
            x = degree_one_hot(g, g.max_degree());
          } else {
            std::optional<FeatureMatrix> noisy;
            if (raw) noisy = corrupt_features(*raw, {tn_corrupt, seed}).features;
            x = tn_source == "raw" ? *noisy : (noisy ? aggregate(*noisy, *phi, mode) : *phi);
          }
          const auto split = gnn::stratified_split(labels, seed);
          const auto res = gnn::train_node_classifier(g, x, labels, split, tn_mpnn.resolve(seed));
          runs.push_back(gnn::metrics_json("node", seed, res.epochs_run, res.test_accuracy, res.model.history));
          metrics.push_back(res.test_accuracy);
          if (s == 0 && !tn_model_out.empty()) gnn::save_model(tn_model_out, res.model);
        }
      });
      const auto j = multi_seed_metrics("node", "accuracy", runs, metrics);
      io::write_file_atomic(tn_out, j.dump(2) + "\n");
      manifest.parameters = tn_mpnn.to_json();
      manifest.parameters["descriptor"] = tn_desc.to_json();
      manifest.parameters.update({{"source", tn_source}, {"mode", tn_mode}, {"corrupt", tn_corrupt}, {"k", tn_k},
                                  {"seeds", tn_seeds}, {"seed", tn_seed}});
      manifest.inputs = {tn_graph.string(), tn_labels.string()};
      if (!tn_features.empty()) manifest.inputs.push_back(tn_features.string());
      manifest.outputs = {tn_out.string()};
      if (!tn_model_out.empty()) manifest.outputs.push_back(tn_model_out.string());
      manifest.write(tn_out);
      const auto s = summarize(metrics);
      out << "test accuracy " << s.mean << " +- " << s.std << " over " << metrics.size() << " seed(s)\n";
    };
  });

  // train-graph ------------------------------------------------------------
  auto* tgraph = app.add_subcommand("train-graph", "graph classification with the mini-MPNN");
  fs::path tg_collection;
  fs::path tg_edges_json;
  fs::path tg_labels_csv;
  fs::path tg_out;
  fs::path tg_model_out;
  std::string tg_features = "esgea";
  std::size_t tg_k = 3;
  std::size_t tg_seeds = 1;
  std::uint64_t tg_seed = 0;
  DescriptorFlags tg_desc;
  MpnnFlags tg_mpnn(gnn::MpnnConfig::graph_defaults());
  tgraph->add_option("--collection", tg_collection, "graph collection (JSON lines)");
  tgraph->add_option("--edges_json,--edges-json", tg_edges_json, "id -> edge list JSON object");
  tgraph->add_option("--labels_csv,--labels-csv", tg_labels_csv, "id,label CSV for --edges-json");
  tgraph->add_option("--features", tg_features, "esgea | degree")->capture_default_str();
  tgraph->add_option("--k", tg_k, "subgraph depth")->capture_default_str();
  tgraph->add_option("--seeds", tg_seeds, "number of seeded repetitions")->capture_default_str();
  tgraph->add_option("--seed", tg_seed, "first seed")->capture_default_str();
  tgraph->add_option("--threads", threads, "embedding worker threads")->capture_default_str();
  tgraph->add_option("--out", tg_out, "metrics JSON")->required();
  tgraph->add_option("--model_out,--model-out", tg_model_out, "model file of the first seed");
  tg_desc.add_to(*tgraph);
  tg_mpnn.add_to(*tgraph);
  tgraph->callback([&] {
    action = [&] {
      manifest.command = "train-graph";
      if (tg_seeds < 1) throw InvalidArgument("--seeds must be >= 1");
      GraphCollection c;
      if (!tg_collection.empty()) {
        c = manifest.timer.time("load", [&] { return io::load_graph_collection(tg_collection); });
        manifest.inputs = {tg_collection.string()};
      } else if (!tg_edges_json.empty() && !tg_labels_csv.empty()) {
        c = manifest.timer.time("load", [&] { return io::load_graph_collection_pair(tg_edges_json, tg_labels_csv); });
        manifest.inputs = {tg_edges_json.string(), tg_labels_csv.string()};
      } else {
        throw InvalidArgument("train-graph needs --collection or --edges-json with --labels-csv");
      }
      gnn::NodeFeatureSource source;
      if (tg_features == "esgea") {
        source = gnn::EsgeaFeatures{tg_k, tg_desc.resolve(), {threads, std::nullopt}};
      } else if (tg_features == "degree") {
        source = gnn::DegreeOneHotFeatures{};
      } else {
        throw InvalidArgument("unknown --features '" + tg_features + "'");
      }
      validate_hops(tg_k);
      const auto feats = manifest.timer.time("features", [&] { return gnn::build_graph_features(c, source); });
      std::vector<json> runs;
      std::vector<double> metrics;
      manifest.timer.time("train", [&] {
        for (std::size_t s = 0; s < tg_seeds; ++s) {
          const std::uint64_t seed = tg_seed + s;
          manifest.seeds.push_back(seed);
          const auto split = gnn::stratified_split(c.labels, seed);
          const auto res = gnn::train_graph_classifier(c, feats, split, tg_mpnn.resolve(seed));
          auto run_json = gnn::metrics_json("graph", seed, res.epochs_run, res.test_auc, res.model.history);
          run_json["test_accuracy"] = res.test_accuracy;
          runs.push_back(std::move(run_json));
          metrics.push_back(res.test_auc);
          if (s == 0 && !tg_model_out.empty()) gnn::save_model(tg_model_out, res.model);
        }
      });
      const auto j = multi_seed_metrics("graph", "auc", runs, metrics);
      io::write_file_atomic(tg_out, j.dump(2) + "\n");
      manifest.parameters = tg_mpnn.to_json();
      manifest.parameters["descriptor"] = tg_desc.to_json();
      manifest.parameters.update({{"features", tg_features}, {"k", tg_k}, {"seeds", tg_seeds}, {"seed", tg_seed}});
      manifest.outputs = {tg_out.string()};
      if (!tg_model_out.empty()) manifest.outputs.push_back(tg_model_out.string());
      manifest.write(tg_out);
      const auto s = summarize(metrics);
      out << "test AUC " << s.mean << " +- " << s.std << " over " << metrics.size() << " seed(s)\n";
    };
  });

  // synth ------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic graph or collection");
  synth::GeneratorSpec gen;
  std::string family = "cycle";
  fs::path synth_out;
  synth_cmd->add_option("--family", family,
                        "cycle | path | star | complete | gnp | tree | two-block | cycle-vs-split-cycle")
      ->required();
  synth_cmd->add_option("--n", gen.n, "nodes (leaves for star, first block for two-block)")->required();
  synth_cmd->add_option("--n2", gen.n2, "second block size (two-block)");
  synth_cmd->add_option("--p", gen.p, "edge probability (gnp; first block for two-block)");
  synth_cmd->add_option("--p2", gen.p2, "second block edge probability (two-block; default = --p)");
  synth_cmd->add_option("--bridges", gen.bridges, "cross-block edges (two-block)")->capture_default_str();
  synth_cmd->add_option("--count", gen.count, "graphs in the collection");
  synth_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "edge list, or JSON-lines collection")->required();
  synth_cmd->callback([&] {
    action = [&] {
      manifest.command = "synth";
      gen.family = synth::parse_family(family);
      if (gen.family == synth::Family::two_block && synth_cmd->count("--p2") == 0) gen.p2 = gen.p;
      manifest.outputs = {synth_out.string()};
      if (gen.is_collection()) {
        const auto c = synth::generate_collection(gen);
        io::write_graph_collection(synth_out, c);
        out << "wrote " << c.size() << " graphs -> " << synth_out.string() << '\n';
      } else {
        const auto g = synth::generate_graph(gen);
        io::write_edge_list(synth_out, g);
        if (g.node_labels) {
          auto labels_path = synth_out;
          labels_path += ".labels.csv";
          auto features_path = synth_out;
          features_path += ".features.csv";
          write_node_labels(labels_path, *g.node_labels);
          io::save_features(features_path, synth::community_indicator(g));
          manifest.outputs.push_back(labels_path.string());
          manifest.outputs.push_back(features_path.string());
        }
        out << "wrote graph with " << g.num_nodes() << " nodes, " << g.num_edges() << " edges -> "
            << synth_out.string() << '\n';
      }
      manifest.parameters = {{"family", family}, {"n", gen.n},         {"n2", gen.n2},      {"p", gen.p},
                             {"p2", gen.p2},     {"bridges", gen.bridges}, {"count", gen.count}};
      manifest.seeds = {gen.seed};
      manifest.write(synth_out);
    };
  });

  // bench ------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "embedding and training time per subgraph depth");
  fs::path bench_graph;
  fs::path bench_labels;
  fs::path bench_out;
  std::vector<std::size_t> k_list;
  std::size_t bench_reps = 3;
  std::size_t bench_epochs = 5;
  DescriptorFlags bench_desc;
  bench->add_option("--graph", bench_graph, "edge-list file")->required();
  bench->add_option("--k", k_list, "subgraph depths, e.g. --k 1,2,3")->delimiter(',');
  bench->add_option("--labels", bench_labels, "node labels used for the timed training epochs");
  bench->add_option("--repetitions", bench_reps, "timing repetitions (minimum is reported)")->capture_default_str();
  bench->add_option("--epochs", bench_epochs, "timed training epochs")->capture_default_str();
  bench->add_option("--threads", threads, "embedding worker threads")->capture_default_str();
  bench->add_option("--out", bench_out, "timing CSV")->required();
  bench_desc.add_to(*bench);
  bench->callback([&] {
    action = [&] {
      manifest.command = "bench";
      if (k_list.empty()) throw InvalidArgument("bench needs a non-empty --k list");
      if (bench_reps < 1 || bench_epochs < 1) throw InvalidArgument("--repetitions and --epochs must be >= 1");
      for (auto k : k_list) validate_hops(k);
      const auto cfg = bench_desc.resolve();
      const auto g = io::load_edge_list(bench_graph);
      std::vector<int> labels;
      if (!bench_labels.empty()) {
        labels = load_node_labels(bench_labels);
      } else {
        // Degree above/below the median: a structural stand-in when no labels are given.
        std::vector<std::size_t> deg(g.num_nodes());
        for (NodeId v = 0; v < g.num_nodes(); ++v) deg[v] = g.degree(v);
        auto sorted = deg;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const auto median = sorted[sorted.size() / 2];
        for (auto d : deg) labels.push_back(d > median ? 1 : 0);
        if (std::count(labels.begin(), labels.end(), 1) == 0) labels.back() = 1;
      }
      std::string csv = "k,n_subgraphs,embed_seconds,train_seconds_per_epoch\n";
      for (auto k : k_list) {
        double embed_best = INFINITY;
        double train_best = INFINITY;
        for (std::size_t rep = 0; rep < bench_reps; ++rep) {
          const auto t0 = std::chrono::steady_clock::now();
          const auto phi = embed_subgraphs(g, k, cfg, {threads, std::nullopt});
          const auto t1 = std::chrono::steady_clock::now();
          auto mc = gnn::MpnnConfig::node_defaults();
          mc.epochs = bench_epochs;
          mc.patience = bench_epochs;
          const auto split = gnn::stratified_split(labels, 0);
          gnn::train_node_classifier(g, phi, labels, split, mc);
          const auto t2 = std::chrono::steady_clock::now();
          embed_best = std::min(embed_best, std::chrono::duration<double>(t1 - t0).count());
          train_best = std::min(train_best,
                                std::chrono::duration<double>(t2 - t1).count() / static_cast<double>(bench_epochs));
        }
        csv += std::to_string(k) + ',' + std::to_string(g.num_nodes()) + ',';
        io::append_double(csv, embed_best);
        csv += ',';
        io::append_double(csv, train_best);
        csv += '\n';
      }
      io::write_file_atomic(bench_out, csv);
      manifest.parameters = bench_desc.to_json();
      manifest.parameters.update({{"k", k_list}, {"repetitions", bench_reps}, {"epochs", bench_epochs},
                                  {"threads", threads}});
      manifest.inputs = {bench_graph.string()};
      manifest.outputs = {bench_out.string()};
      manifest.write(bench_out);
      out << csv;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    action();
    return kOk;
  } catch (const InvalidArgument& e) {
    err << "esgea " << stage << ": usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "esgea " << stage << ": data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "esgea " << stage << ": data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    err << "esgea " << stage << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "esgea " << stage << ": error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace esgea::cli
