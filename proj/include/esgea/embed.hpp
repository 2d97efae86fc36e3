#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "esgea/ego.hpp"
#include "esgea/graph.hpp"
#include "esgea/lanczos.hpp"
#include "esgea/laplacian.hpp"
#include "esgea/parallel.hpp"
#include "esgea/spectral.hpp"

namespace esgea {

/// n x d' matrix; row v is the descriptor of v's ego subgraph.
using NodeEmbeddingMatrix = FeatureMatrix;

struct EmbedOptions {
  std::size_t threads = 1;
  std::optional<std::size_t> max_ball_size;
};

namespace detail {

/// Position of each node after sorting by color-refinement class, ties by id.
/// Isomorphic graphs whose refined classes fix the structure map to the same
/// matrix, so their eigenvalues agree bit for bit.
inline std::vector<NodeId> refinement_order(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> color(n);
  for (NodeId v = 0; v < n; ++v) color[v] = g.degree(v);
  std::size_t classes = 0;
  for (std::size_t round = 0; round < n; ++round) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::vector<std::size_t>> sig(n);
    for (NodeId v = 0; v < n; ++v) {
      sig[v].push_back(color[v]);
      for (NodeId u : g.neighbors(v)) sig[v].push_back(color[u]);
      std::sort(sig[v].begin() + 1, sig[v].end());
      ids.emplace(sig[v], 0);
    }
    std::size_t next = 0;
    for (auto& [key, id] : ids) id = next++;
    for (NodeId v = 0; v < n; ++v) color[v] = ids[sig[v]];
    if (next == classes) break;
    classes = next;
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return color[a] < color[b]; });
  std::vector<NodeId> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = static_cast<NodeId>(i);
  return pos;
}

}  // namespace detail

/// Spectrum of a whole (sub)graph according to the config's approximation policy.
inline SpectralDecomposition graph_spectrum(const Graph& g, const DescriptorConfig& config) {
  const auto lap = build_laplacian(g.permuted(detail::refinement_order(g)), config.laplacian);
  const auto n = g.num_nodes();
  const bool approximate =
      (config.approximation == ApproximationMode::extreme && n > config.extreme_count) ||
      (config.approximation == ApproximationMode::automatic && n > config.approx_threshold &&
       n > config.extreme_count);
  return approximate ? approx_spectrum(lap, config.extreme_count) : eigendecompose(lap);
}

/// Descriptor of a whole graph.
inline EmbeddingVector describe_graph(const Graph& g, const DescriptorConfig& config) {
  auto out = kernel_trace(graph_spectrum(g, config), config.grid, config.kernel);
  if (config.normalization == Normalization::by_node_count) {
    const auto n = static_cast<double>(g.num_nodes());
    for (double& v : out.values) v /= n;
  }
  return out;
}

/// Row v = descriptor of the k-order ego subgraph of v. Output is identical
/// for any thread count.
inline NodeEmbeddingMatrix embed_subgraphs(const Graph& g, std::size_t k, const DescriptorConfig& config,
                                           const EmbedOptions& opts = {}) {
  validate_hops(k);
  config.validate();
  NodeEmbeddingMatrix out(g.num_nodes(), config.dim());
  parallel_for_chunks(g.num_nodes(), opts.threads, [&](std::size_t begin, std::size_t end) {
    detail::BallSearcher search(g.num_nodes());
    for (std::size_t v = begin; v < end; ++v) {
      const auto ball = search(g, static_cast<NodeId>(v), k, opts.max_ball_size);
      const auto sub = induced_subgraph(g, ball);
      const auto row = describe_graph(sub.local_graph, config);
      for (std::size_t c = 0; c < row.values.size(); ++c) out(v, c) = row.values[c];
    }
  });
  return out;
}

}  // namespace esgea
