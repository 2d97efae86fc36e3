#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "esgea/error.hpp"

namespace esgea {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Row-major dense matrix; row v holds the feature vector of node v.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable undirected simple graph in CSR form with sorted neighbor lists.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list. Self-loops and duplicates are
  /// dropped; every edge is stored in both directions.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
    std::vector<Edge> und;
    und.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u >= num_nodes || v >= num_nodes) {
        throw InvalidArgument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") out of range for " + std::to_string(num_nodes) + " nodes");
      }
      if (u == v) continue;
      und.emplace_back(u, v);
      und.emplace_back(v, u);
    }
    std::sort(und.begin(), und.end());
    und.erase(std::unique(und.begin(), und.end()), und.end());

    Graph g;
    g.offsets_.assign(num_nodes + 1, 0);
    for (auto [u, v] : und) ++g.offsets_[u + 1];
    for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.reserve(und.size());
    for (auto [u, v] : und) g.targets_.push_back(v);
    return g;
  }

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::size_t max_degree() const {
    std::size_t best = 0;
    for (NodeId v = 0; v < num_nodes(); ++v) best = std::max(best, degree(v));
    return best;
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Each undirected edge once, as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < num_nodes(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  /// Relabels node v as perm[v].
  Graph permuted(std::span<const NodeId> perm) const {
    if (perm.size() != num_nodes()) throw InvalidArgument("permutation size mismatch");
    std::vector<Edge> e;
    for (auto [u, v] : edges()) e.emplace_back(perm[u], perm[v]);
    Graph g = from_edges(num_nodes(), e);
    g.graph_label = graph_label;
    if (node_labels) {
      std::vector<int> labels(num_nodes());
      for (NodeId v = 0; v < num_nodes(); ++v) labels[perm[v]] = (*node_labels)[v];
      g.node_labels = std::move(labels);
    }
    return g;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

  std::optional<std::vector<int>> node_labels;
  std::optional<int> graph_label;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Dense n x d node feature matrix; entries must be finite.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : values_(Matrix::Zero(rows, cols)) {}
  explicit FeatureMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.allFinite()) throw DataError("feature matrix contains non-finite entries");
  }

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }

  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
  double& operator()(std::size_t r, std::size_t c) { return values_(r, c); }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Graphs with aligned class labels (contiguous from 0).
struct GraphCollection {
  std::vector<Graph> graphs;
  std::vector<int> labels;

  std::size_t size() const { return graphs.size(); }

  std::size_t num_classes() const {
    if (labels.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  }

  void validate() const {
    if (graphs.empty()) throw DataError("empty collection");
    if (labels.size() != graphs.size()) throw DataError("labels length differs from graphs length");
    std::vector<bool> seen(num_classes(), false);
    for (int l : labels) {
      if (l < 0) throw DataError("negative class id " + std::to_string(l));
      seen[static_cast<std::size_t>(l)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw DataError("class ids are not contiguous from 0");
    }
  }
};

/// One-hot degree encoding of width max_degree + 1. Without clamping, a node
/// whose degree exceeds max_degree is an error.
inline FeatureMatrix degree_one_hot(const Graph& g, std::size_t max_degree, bool clamp = false) {
  FeatureMatrix x(g.num_nodes(), max_degree + 1);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    std::size_t d = g.degree(v);
    if (d > max_degree) {
      if (!clamp) {
        throw InvalidArgument("node " + std::to_string(v) + " has degree " + std::to_string(d) +
                              " > max_degree " + std::to_string(max_degree));
      }
      d = max_degree;
    }
    x(v, d) = 1.0;
  }
  return x;
}

/// Number of connected components (iterative DFS).
inline std::size_t count_components(const Graph& g) {
  std::vector<bool> seen(g.num_nodes(), false);
  std::vector<NodeId> stack;
  std::size_t comps = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (seen[s]) continue;
    ++comps;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : g.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
  }
  return comps;
}

}  // namespace esgea
