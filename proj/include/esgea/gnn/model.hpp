#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea::gnn {

/// Neighbor aggregation over N(v) plus v itself. gcn is the symmetric
/// normalized sum D^-1/2 (A + I) D^-1/2.
enum class Aggregator { gcn, mean, sum, max };
enum class Readout { mean, sum };

inline Aggregator parse_aggregator(std::string_view s) {
  if (s == "gcn") return Aggregator::gcn;
  if (s == "mean") return Aggregator::mean;
  if (s == "sum") return Aggregator::sum;
  if (s == "max") return Aggregator::max;
  throw InvalidArgument("unknown aggregator '" + std::string(s) + "'");
}

inline Readout parse_readout(std::string_view s) {
  if (s == "mean") return Readout::mean;
  if (s == "sum") return Readout::sum;
  throw InvalidArgument("unknown readout '" + std::string(s) + "'");
}

inline std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::gcn: return "gcn";
    case Aggregator::mean: return "mean";
    case Aggregator::sum: return "sum";
    case Aggregator::max: return "max";
  }
  return "?";
}

inline std::string_view to_string(Readout r) { return r == Readout::mean ? "mean" : "sum"; }

struct MpnnConfig {
  std::size_t num_layers = 3;
  std::size_t hidden_dim = 16;
  Aggregator aggregator = Aggregator::gcn;
  Readout readout = Readout::mean;
  double learning_rate = 0.01;
  double weight_decay = 1e-4;
  std::size_t epochs = 200;
  std::size_t patience = 50;
  std::uint64_t seed = 0;
  std::size_t batch_size = 128;

  void validate() const {
    if (num_layers < 1) throw InvalidArgument("num_layers must be >= 1");
    if (hidden_dim < 1) throw InvalidArgument("hidden_dim must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
    if (!(weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be >= 0");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  }

  /// Node-task defaults (16 hidden channels, lr 0.01, wd 1e-4, 200 epochs, patience 50).
  static MpnnConfig node_defaults() { return {}; }

  /// Graph-task defaults (lr 1e-4, batch 128, 100 epochs).
  static MpnnConfig graph_defaults() {
    MpnnConfig c;
    c.learning_rate = 1e-4;
    c.weight_decay = 0.0;
    c.epochs = 100;
    c.batch_size = 128;
    return c;
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Message-passing weights W^(1..L) (no bias), then a linear head with bias.
/// Shapes chain input_dim -> hidden -> ... -> hidden -> num_classes.
struct TrainedModel {
  MpnnConfig config;
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  std::vector<Matrix> layers;
  Matrix head_weight;
  Matrix head_bias;  // 1 x num_classes
  std::vector<EpochRecord> history;

  /// Glorot-uniform initialization from config.seed.
  static TrainedModel initialize(const MpnnConfig& config, std::size_t input_dim, std::size_t num_classes) {
    config.validate();
    if (input_dim == 0) throw InvalidArgument("input dimension must be >= 1");
    if (num_classes < 2) throw InvalidArgument("need at least 2 classes");
    TrainedModel m;
    m.config = config;
    m.input_dim = input_dim;
    m.num_classes = num_classes;
    std::mt19937_64 rng(config.seed);
    auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> u(-limit, limit);
      Matrix w(fan_in, fan_out);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
      return w;
    };
    std::size_t fan_in = input_dim;
    for (std::size_t l = 0; l < config.num_layers; ++l) {
      m.layers.push_back(glorot(fan_in, config.hidden_dim));
      fan_in = config.hidden_dim;
    }
    m.head_weight = glorot(config.hidden_dim, num_classes);
    m.head_bias = Matrix::Zero(1, static_cast<Eigen::Index>(num_classes));
    return m;
  }

  /// All trainable tensors in a fixed order: layers, head weight, head bias.
  std::vector<Matrix*> parameters() {
    std::vector<Matrix*> p;
    for (auto& w : layers) p.push_back(&w);
    p.push_back(&head_weight);
    p.push_back(&head_bias);
    return p;
  }
};

/// Neighbor aggregation operator for one graph, built once and reused.
class Propagation {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  Propagation() = default;
  Propagation(const Graph& g, Aggregator agg) : agg_(agg), n_(g.num_nodes()) {
    if (agg == Aggregator::max) {
      closed_.resize(n_);
      for (NodeId v = 0; v < n_; ++v) {
        auto& nb = closed_[v];
        nb.push_back(v);
        nb.insert(nb.end(), g.neighbors(v).begin(), g.neighbors(v).end());
      }
      return;
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(n_ + 2 * g.num_edges());
    for (NodeId v = 0; v < n_; ++v) {
      const double dv = static_cast<double>(g.degree(v) + 1);
      auto weight = [&](NodeId u) {
        switch (agg) {
          case Aggregator::gcn: return 1.0 / std::sqrt(dv * static_cast<double>(g.degree(u) + 1));
          case Aggregator::mean: return 1.0 / dv;
          default: return 1.0;
        }
      };
      t.emplace_back(v, v, weight(v));
      for (NodeId u : g.neighbors(v)) t.emplace_back(v, u, weight(u));
    }
    op_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    op_.setFromTriplets(t.begin(), t.end());
    op_t_ = op_.transpose();
  }

  std::size_t num_nodes() const { return n_; }

  /// Z = AGG(H). For max, records the winning source node per entry.
  Matrix forward(const Matrix& h, std::vector<NodeId>* argmax = nullptr) const {
    if (agg_ != Aggregator::max) return op_ * h;
    Matrix z(h.rows(), h.cols());
    if (argmax) argmax->assign(static_cast<std::size_t>(h.size()), 0);
    for (std::size_t v = 0; v < n_; ++v) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) {
        NodeId best = closed_[v].front();
        double val = -std::numeric_limits<double>::infinity();
        for (NodeId u : closed_[v]) {
          if (h(u, c) > val) {
            val = h(u, c);
            best = u;
          }
        }
        z(static_cast<Eigen::Index>(v), c) = val;
        if (argmax) (*argmax)[v * static_cast<std::size_t>(h.cols()) + static_cast<std::size_t>(c)] = best;
      }
    }
    return z;
  }

  /// dL/dH given dL/dZ.
  Matrix backward(const Matrix& dz, const std::vector<NodeId>& argmax) const {
    if (agg_ != Aggregator::max) return op_t_ * dz;
    Matrix dh = Matrix::Zero(dz.rows(), dz.cols());
    for (std::size_t v = 0; v < n_; ++v) {
      for (Eigen::Index c = 0; c < dz.cols(); ++c) {
        dh(argmax[v * static_cast<std::size_t>(dz.cols()) + static_cast<std::size_t>(c)], c) +=
            dz(static_cast<Eigen::Index>(v), c);
      }
    }
    return dh;
  }

 private:
  Aggregator agg_ = Aggregator::gcn;
  std::size_t n_ = 0;
  Sparse op_;
  Sparse op_t_;
  std::vector<std::vector<NodeId>> closed_;
};

/// Activations kept for backpropagation.
struct ForwardCache {
  std::vector<Matrix> inputs;      // H^(l-1) per layer
  std::vector<Matrix> aggregated;  // Z^(l) = AGG(H^(l-1))
  std::vector<Matrix> pre;         // Z^(l) W^(l)
  std::vector<std::vector<NodeId>> argmax;
  Matrix output;                   // H^(L)
};

inline void check_input(const Propagation& prop, const Matrix& x, const TrainedModel& model) {
  if (static_cast<std::size_t>(x.rows()) != prop.num_nodes()) {
    throw InvalidArgument("feature rows (" + std::to_string(x.rows()) + ") != graph nodes (" +
                          std::to_string(prop.num_nodes()) + ")");
  }
  if (static_cast<std::size_t>(x.cols()) != model.input_dim) {
    throw InvalidArgument("feature width " + std::to_string(x.cols()) + " != model input dim " +
                          std::to_string(model.input_dim));
  }
}

/// h^(0) = x; h^(l) = relu(AGG(h^(l-1)) W^(l)). Returns h^(L) with cache.
inline ForwardCache mpnn_forward(const Propagation& prop, const Matrix& x, const TrainedModel& model) {
  check_input(prop, x, model);
  ForwardCache cache;
  Matrix h = x;
  for (const auto& w : model.layers) {
    cache.argmax.emplace_back();
    Matrix z = prop.forward(h, &cache.argmax.back());
    Matrix pre = z * w;
    cache.inputs.push_back(std::move(h));
    h = pre.cwiseMax(0.0);
    cache.aggregated.push_back(std::move(z));
    cache.pre.push_back(std::move(pre));
  }
  cache.output = std::move(h);
  return cache;
}

inline Matrix mpnn_forward(const Graph& g, const FeatureMatrix& x, const TrainedModel& model) {
  return mpnn_forward(Propagation(g, model.config.aggregator), x.values(), model).output;
}

/// Gradients laid out like TrainedModel::parameters().
struct Gradients {
  std::vector<Matrix> layers;
  Matrix head_weight;
  Matrix head_bias;

  static Gradients zeros_like(const TrainedModel& m) {
    Gradients g;
    for (const auto& w : m.layers) g.layers.push_back(Matrix::Zero(w.rows(), w.cols()));
    g.head_weight = Matrix::Zero(m.head_weight.rows(), m.head_weight.cols());
    g.head_bias = Matrix::Zero(m.head_bias.rows(), m.head_bias.cols());
    return g;
  }

  std::vector<Matrix*> tensors() {
    std::vector<Matrix*> p;
    for (auto& w : layers) p.push_back(&w);
    p.push_back(&head_weight);
    p.push_back(&head_bias);
    return p;
  }
};

/// Accumulates gradients of the message-passing stack given dL/dH^(L).
inline void mpnn_backward(const Propagation& prop, const ForwardCache& cache, const TrainedModel& model,
                          Matrix d_out, Gradients& grads) {
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    Matrix d_pre = d_out.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    grads.layers[l] += cache.aggregated[l].transpose() * d_pre;
    if (l == 0) break;
    Matrix d_z = d_pre * model.layers[l].transpose();
    d_out = prop.backward(d_z, cache.argmax[l]);
  }
}

inline Matrix head_logits(const Matrix& h, const TrainedModel& model) {
  Matrix logits = h * model.head_weight;
  logits.rowwise() += model.head_bias.row(0);
  return logits;
}

/// Columnwise mean or sum over nodes.
inline Matrix readout(const Matrix& h, Readout mode) {
  if (h.rows() == 0) throw InvalidArgument("readout of an empty node set");
  Matrix r = h.colwise().sum();
  if (mode == Readout::mean) r /= static_cast<double>(h.rows());
  return r;
}

}  // namespace esgea::gnn
