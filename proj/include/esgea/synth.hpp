#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea::synth {

inline Graph cycle(std::size_t n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

inline Graph path(std::size_t n) {
  if (n < 1) throw InvalidArgument("path needs n >= 1");
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

/// Star K_{1,leaves}; node 0 is the hub.
inline Graph star(std::size_t leaves) {
  if (leaves < 1) throw InvalidArgument("star needs >= 1 leaf");
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

inline Graph complete(std::size_t n) {
  if (n < 1) throw InvalidArgument("complete graph needs n >= 1");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph::from_edges(n, e);
}

/// Erdos-Renyi G(n, p).
inline Graph gnp(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("gnp needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("gnp probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) e.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, e);
}

/// Random recursive tree: node i > 0 attaches to a uniform earlier node.
inline Graph random_tree(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("tree needs n >= 2");
  std::mt19937_64 rng(seed);
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    e.emplace_back(parent(rng), i);
  }
  return Graph::from_edges(n, e);
}

struct TwoBlockSpec {
  std::size_t size_a = 10;
  std::size_t size_b = 10;
  double p_in_a = 1.0;
  double p_in_b = 1.0;
  std::size_t bridges = 1;
  std::uint64_t seed = 0;
};

/// Two G(n, p) blocks joined by `bridges` distinct random cross edges. Nodes
/// 0..size_a-1 form block 0 and carry node label 0, the rest label 1.
inline Graph two_block(const TwoBlockSpec& s) {
  if (s.size_a < 1 || s.size_b < 1) throw InvalidArgument("two-block needs non-empty blocks");
  if (!(s.p_in_a >= 0.0 && s.p_in_a <= 1.0 && s.p_in_b >= 0.0 && s.p_in_b <= 1.0)) {
    throw InvalidArgument("two-block probabilities must lie in [0, 1]");
  }
  if (s.bridges > s.size_a * s.size_b) throw InvalidArgument("too many bridge edges");
  const std::size_t n = s.size_a + s.size_b;
  std::mt19937_64 rng(s.seed);
  std::bernoulli_distribution in_a(s.p_in_a);
  std::bernoulli_distribution in_b(s.p_in_b);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool ia = i < s.size_a;
      const bool ja = j < s.size_a;
      if (ia && ja && in_a(rng)) e.emplace_back(i, j);
      if (!ia && !ja && in_b(rng)) e.emplace_back(i, j);
    }
  }
  std::uniform_int_distribution<std::size_t> pick_a(0, s.size_a - 1);
  std::uniform_int_distribution<std::size_t> pick_b(s.size_a, n - 1);
  std::vector<Edge> bridges;
  while (bridges.size() < s.bridges) {
    Edge b{static_cast<NodeId>(pick_a(rng)), static_cast<NodeId>(pick_b(rng))};
    if (std::find(bridges.begin(), bridges.end(), b) == bridges.end()) bridges.push_back(b);
  }
  e.insert(e.end(), bridges.begin(), bridges.end());
  Graph g = Graph::from_edges(n, e);
  std::vector<int> labels(n, 0);
  for (std::size_t i = s.size_a; i < n; ++i) labels[i] = 1;
  g.node_labels = std::move(labels);
  return g;
}

/// One-hot community indicator from node labels.
inline FeatureMatrix community_indicator(const Graph& g) {
  if (!g.node_labels) throw InvalidArgument("graph has no node labels");
  const auto& labels = *g.node_labels;
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  FeatureMatrix x(g.num_nodes(), static_cast<std::size_t>(classes));
  for (std::size_t v = 0; v < labels.size(); ++v) x(v, static_cast<std::size_t>(labels[v])) = 1.0;
  return x;
}

/// `count` graphs alternating between a single n-cycle (label 0) and two
/// disjoint (n/2)-cycles (label 1). Both classes are 2-regular on n nodes.
inline GraphCollection cycle_vs_split_cycle(std::size_t n, std::size_t count) {
  if (n < 6 || n % 2 != 0) throw InvalidArgument("cycle-vs-split-cycle needs even n >= 6");
  if (count < 2 || count % 2 != 0) throw InvalidArgument("cycle-vs-split-cycle needs an even count >= 2");
  std::vector<Edge> single;
  for (std::size_t i = 0; i < n; ++i) single.emplace_back(i, (i + 1) % n);
  std::vector<Edge> split;
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < h; ++i) {
    split.emplace_back(i, (i + 1) % h);
    split.emplace_back(h + i, h + (i + 1) % h);
  }
  GraphCollection c;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 2);
    Graph g = Graph::from_edges(n, label == 0 ? single : split);
    g.graph_label = label;
    c.graphs.push_back(std::move(g));
    c.labels.push_back(label);
  }
  return c;
}

enum class Family { cycle, path, star, complete, gnp, tree, two_block, cycle_vs_split_cycle };

inline Family parse_family(std::string_view s) {
  if (s == "cycle") return Family::cycle;
  if (s == "path") return Family::path;
  if (s == "star") return Family::star;
  if (s == "complete") return Family::complete;
  if (s == "gnp" || s == "random-gnp") return Family::gnp;
  if (s == "tree") return Family::tree;
  if (s == "two-block") return Family::two_block;
  if (s == "cycle-vs-split-cycle") return Family::cycle_vs_split_cycle;
  throw InvalidArgument("unknown generator family '" + std::string(s) + "'");
}

struct GeneratorSpec {
  Family family = Family::cycle;
  /// Node count (cycle, path, complete, gnp, tree, collection graphs), leaf
  /// count (star), or first block size (two-block).
  std::size_t n = 0;
  std::size_t n2 = 0;
  double p = 0.0;
  double p2 = 0.0;
  std::size_t bridges = 1;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  bool is_collection() const { return family == Family::cycle_vs_split_cycle; }
};

inline Graph generate_graph(const GeneratorSpec& s) {
  switch (s.family) {
    case Family::cycle: return cycle(s.n);
    case Family::path: return path(s.n);
    case Family::star: return star(s.n);
    case Family::complete: return complete(s.n);
    case Family::gnp: return gnp(s.n, s.p, s.seed);
    case Family::tree: return random_tree(s.n, s.seed);
    case Family::two_block: return two_block({s.n, s.n2, s.p, s.p2, s.bridges, s.seed});
    case Family::cycle_vs_split_cycle: break;
  }
  throw InvalidArgument("generator family produces a collection, not a graph");
}

inline GraphCollection generate_collection(const GeneratorSpec& s) {
  if (s.family != Family::cycle_vs_split_cycle) throw InvalidArgument("generator family produces a single graph");
  return cycle_vs_split_cycle(s.n, s.count);
}

}  // namespace esgea::synth
