#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "esgea/embed.hpp"
#include "esgea/error.hpp"
#include "esgea/gnn/metrics.hpp"
#include "esgea/gnn/model.hpp"
#include "esgea/graph.hpp"

namespace esgea::gnn {

/// Adam with L2 weight decay folded into the gradient.
class Adam {
 public:
  Adam(const TrainedModel& model, double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {
    auto z = Gradients::zeros_like(model);
    m_ = z;
    v_ = z;
  }

  void step(TrainedModel& model, Gradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    auto params = model.parameters();
    auto g = grads.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t i = 0; i < params.size(); ++i) {
      Matrix grad = *g[i];
      if (wd_ > 0.0) grad += wd_ * *params[i];
      *m[i] = b1_ * *m[i] + (1.0 - b1_) * grad;
      *v[i] = b2_ * *v[i] + (1.0 - b2_) * grad.cwiseProduct(grad);
      const auto mhat = m[i]->array() / c1;
      const auto vhat = v[i]->array() / c2;
      params[i]->array() -= lr_ * mhat / (vhat.sqrt() + eps_);
    }
  }

 private:
  double lr_;
  double wd_;
  double b1_;
  double b2_;
  double eps_;
  std::size_t t_ = 0;
  Gradients m_;
  Gradients v_;
};

/// Index sets into nodes (node task) or graphs (graph task).
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  void require_non_empty() const {
    if (train.empty()) throw InvalidArgument("split has an empty train part");
    if (val.empty()) throw InvalidArgument("split has an empty validation part");
    if (test.empty()) throw InvalidArgument("split has an empty test part");
  }
};

/// Stratified seeded split: `test_fraction` of each class for test, then
/// `val_fraction` of the remainder for validation. Classes with at least
/// three members put at least one member in each part.
inline Split stratified_split(std::span<const int> labels, std::uint64_t seed, double test_fraction = 0.2,
                              double val_fraction = 0.1) {
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Split s;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = members.size();
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n >= 3) n_test = std::max<std::size_t>(n_test, 1);
    const auto rest = n - n_test;
    auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(rest)));
    if (n >= 3) n_val = std::max<std::size_t>(n_val, 1);
    s.test.insert(s.test.end(), members.begin(), members.begin() + n_test);
    s.val.insert(s.val.end(), members.begin() + n_test, members.begin() + n_test + n_val);
    s.train.insert(s.train.end(), members.begin() + n_test + n_val, members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline std::size_t count_classes(std::span<const int> labels) {
  int classes = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("negative class label");
    classes = std::max(classes, l + 1);
  }
  return static_cast<std::size_t>(classes);
}

// ---------------------------------------------------------------------------
// Node classification

/// Loss over `rows` of a single graph plus gradients of every parameter.
inline double node_loss_and_gradients(const Propagation& prop, const Matrix& x, const TrainedModel& model,
                                      std::span<const int> labels, std::span<const std::size_t> rows,
                                      Gradients* grads) {
  const auto cache = mpnn_forward(prop, x, model);
  const Matrix logits = head_logits(cache.output, model);
  const auto ce = softmax_cross_entropy(logits, labels, rows);
  if (grads) {
    grads->head_weight += cache.output.transpose() * ce.grad;
    grads->head_bias += ce.grad.colwise().sum();
    mpnn_backward(prop, cache, model, ce.grad * model.head_weight.transpose(), *grads);
  }
  return ce.loss;
}

struct NodeTrainResult {
  TrainedModel model;
  double test_accuracy = 0.0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
};

/// Full-batch training with early stopping on validation loss; the weights
/// with the best validation loss are restored before testing.
inline NodeTrainResult train_node_classifier(const Graph& g, const FeatureMatrix& x, std::span<const int> labels,
                                             const Split& split, const MpnnConfig& config) {
  config.validate();
  split.require_non_empty();
  if (labels.size() != g.num_nodes()) throw InvalidArgument("one label per node required");
  const Propagation prop(g, config.aggregator);
  NodeTrainResult r;
  r.model = TrainedModel::initialize(config, x.cols(), std::max<std::size_t>(2, count_classes(labels)));
  check_input(prop, x.values(), r.model);
  Adam opt(r.model, config.learning_rate, config.weight_decay);

  double best_val = std::numeric_limits<double>::infinity();
  TrainedModel best = r.model;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto grads = Gradients::zeros_like(r.model);
    const double train_loss = node_loss_and_gradients(prop, x.values(), r.model, labels, split.train, &grads);
    opt.step(r.model, grads);
    const double val_loss = node_loss_and_gradients(prop, x.values(), r.model, labels, split.val, nullptr);
    r.model.history.push_back({epoch, train_loss, val_loss});
    r.epochs_run = epoch;
    if (val_loss < best_val) {
      best_val = val_loss;
      best = r.model;
      r.best_epoch = epoch;
    } else if (epoch - r.best_epoch >= config.patience) {
      break;
    }
  }
  auto history = std::move(r.model.history);
  if (r.best_epoch > 0) r.model = std::move(best);
  r.model.history = std::move(history);

  const auto out = mpnn_forward(prop, x.values(), r.model).output;
  const auto pred = argmax_rows(head_logits(out, r.model));
  std::vector<int> p;
  std::vector<int> y;
  for (auto i : split.test) {
    p.push_back(pred[i]);
    y.push_back(labels[i]);
  }
  r.test_accuracy = evaluate_accuracy(p, y);
  return r;
}

// ---------------------------------------------------------------------------
// Graph classification

/// A graph with its operator and input features, ready for repeated passes.
struct PreparedGraph {
  Propagation prop;
  Matrix features;
};

inline std::vector<PreparedGraph> prepare_graphs(const GraphCollection& c, std::span<const FeatureMatrix> features,
                                                 Aggregator agg) {
  if (features.size() != c.size()) throw InvalidArgument("one feature matrix per graph required");
  std::vector<PreparedGraph> out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (features[i].rows() != c.graphs[i].num_nodes()) {
      throw InvalidArgument("graph " + std::to_string(i) + ": feature rows do not match node count");
    }
    out.push_back({Propagation(c.graphs[i], agg), features[i].values()});
  }
  return out;
}

/// Loss of one graph (scaled by `weight`) and accumulated gradients.
inline double graph_loss_and_gradients(const PreparedGraph& pg, const TrainedModel& model, int label,
                                       double weight, Gradients* grads) {
  const auto cache = mpnn_forward(pg.prop, pg.features, model);
  const Matrix pooled = readout(cache.output, model.config.readout);
  const Matrix logits = head_logits(pooled, model);
  const int y[1] = {label};
  const std::size_t row[1] = {0};
  const auto ce = softmax_cross_entropy(logits, y, row);
  if (grads) {
    const Matrix d_logits = weight * ce.grad;
    grads->head_weight += pooled.transpose() * d_logits;
    grads->head_bias += d_logits;
    Matrix d_pooled = d_logits * model.head_weight.transpose();
    if (model.config.readout == Readout::mean) d_pooled /= static_cast<double>(cache.output.rows());
    Matrix d_out = d_pooled.replicate(cache.output.rows(), 1);
    mpnn_backward(pg.prop, cache, model, std::move(d_out), *grads);
  }
  return ce.loss;
}

inline Matrix graph_probabilities(const PreparedGraph& pg, const TrainedModel& model) {
  const auto out = mpnn_forward(pg.prop, pg.features, model).output;
  return softmax_rows(head_logits(readout(out, model.config.readout), model));
}

struct GraphTrainResult {
  TrainedModel model;
  double test_auc = 0.0;
  double test_accuracy = 0.0;
  double train_auc = 0.0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
};

/// Scores every graph in `idx` and returns AUC and accuracy.
inline std::pair<double, double> score_graphs(const std::vector<PreparedGraph>& graphs, const TrainedModel& model,
                                              std::span<const int> labels, std::span<const std::size_t> idx) {
  Matrix prob(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(model.num_classes));
  std::vector<int> y;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    prob.row(static_cast<Eigen::Index>(i)) = graph_probabilities(graphs[idx[i]], model).row(0);
    y.push_back(labels[idx[i]]);
  }
  return {evaluate_multiclass_auc(prob, y), evaluate_accuracy(argmax_rows(prob), y)};
}

/// Minibatch training over graphs with readout + linear head. Train and
/// test parts may overlap (used for memorization checks).
inline GraphTrainResult train_graph_classifier(const GraphCollection& c, std::span<const FeatureMatrix> features,
                                               const Split& split, const MpnnConfig& config) {
  config.validate();
  split.require_non_empty();
  c.validate();
  if (c.num_classes() < 2) throw InvalidArgument("graph classification needs >= 2 classes");
  const auto graphs = prepare_graphs(c, features, config.aggregator);
  GraphTrainResult r;
  r.model = TrainedModel::initialize(config, features.front().cols(), c.num_classes());
  for (const auto& f : features) {
    if (f.cols() != r.model.input_dim) throw InvalidArgument("feature widths differ across graphs");
  }
  Adam opt(r.model, config.learning_rate, config.weight_decay);
  std::mt19937_64 rng(config.seed ^ 0xb5ad4eceda1ce2a9ULL);

  auto val_loss_of = [&](const TrainedModel& m) {
    double sum = 0.0;
    for (auto i : split.val) sum += graph_loss_and_gradients(graphs[i], m, c.labels[i], 1.0, nullptr);
    return sum / static_cast<double>(split.val.size());
  };

  double best_val = std::numeric_limits<double>::infinity();
  TrainedModel best = r.model;
  std::vector<std::size_t> order = split.train;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double train_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double w = 1.0 / static_cast<double>(e - b);
      auto grads = Gradients::zeros_like(r.model);
      for (std::size_t i = b; i < e; ++i) {
        train_sum += graph_loss_and_gradients(graphs[order[i]], r.model, c.labels[order[i]], w, &grads);
      }
      opt.step(r.model, grads);
    }
    const double val_loss = val_loss_of(r.model);
    r.model.history.push_back({epoch, train_sum / static_cast<double>(order.size()), val_loss});
    r.epochs_run = epoch;
    if (val_loss < best_val) {
      best_val = val_loss;
      best = r.model;
      r.best_epoch = epoch;
    } else if (epoch - r.best_epoch >= config.patience) {
      break;
    }
  }
  auto history = std::move(r.model.history);
  if (r.best_epoch > 0) r.model = std::move(best);
  r.model.history = std::move(history);

  std::tie(r.test_auc, r.test_accuracy) = score_graphs(graphs, r.model, c.labels, split.test);
  r.train_auc = score_graphs(graphs, r.model, c.labels, split.train).first;
  return r;
}

// ---------------------------------------------------------------------------
// Node feature sources for graph classification

struct EsgeaFeatures {
  std::size_t k = 3;
  DescriptorConfig descriptor;
  EmbedOptions embed;
};

struct DegreeOneHotFeatures {
  /// Width is max_degree + 1; unset uses the collection's maximum degree.
  std::optional<std::size_t> max_degree;
};

using NodeFeatureSource = std::variant<EsgeaFeatures, DegreeOneHotFeatures>;

/// Per-graph input features; ESGEA embeddings replace any existing features.
inline std::vector<FeatureMatrix> build_graph_features(const GraphCollection& c, const NodeFeatureSource& source) {
  std::vector<FeatureMatrix> out;
  out.reserve(c.size());
  if (const auto* e = std::get_if<EsgeaFeatures>(&source)) {
    for (const auto& g : c.graphs) out.push_back(embed_subgraphs(g, e->k, e->descriptor, e->embed));
    return out;
  }
  const auto& d = std::get<DegreeOneHotFeatures>(source);
  std::size_t max_deg = 0;
  for (const auto& g : c.graphs) max_deg = std::max(max_deg, g.max_degree());
  const std::size_t width = d.max_degree.value_or(max_deg);
  for (const auto& g : c.graphs) out.push_back(degree_one_hot(g, width, d.max_degree.has_value()));
  return out;
}

}  // namespace esgea::gnn
