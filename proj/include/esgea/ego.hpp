#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"
#include "esgea/parallel.hpp"

namespace esgea {

/// Nodes within `radius` hops of `center`, sorted ascending.
struct KBall {
  NodeId center = 0;
  std::size_t radius = 1;
  std::vector<NodeId> members;
};

/// Induced subgraph on a ball. local id i corresponds to id_map[i].
struct EgoSubgraph {
  NodeId center = 0;
  Graph local_graph;
  std::vector<NodeId> id_map;
};

struct ExtractOptions {
  /// Reject balls with more members than this. Unset means no cap.
  std::optional<std::size_t> max_ball_size;
  std::size_t threads = 1;
};

namespace detail {

/// Reusable BFS scratch space so repeated balls avoid reallocating.
class BallSearcher {
 public:
  explicit BallSearcher(std::size_t n) : dist_(n, kUnseen) {}

  KBall operator()(const Graph& g, NodeId v, std::size_t k, std::optional<std::size_t> cap) {
    KBall ball{v, k, {}};
    auto& frontier = ball.members;
    frontier.push_back(v);
    dist_[v] = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId x = frontier[head];
      if (dist_[x] == k) continue;
      for (NodeId u : g.neighbors(x)) {
        if (dist_[u] != kUnseen) continue;
        dist_[u] = dist_[x] + 1;
        frontier.push_back(u);
      }
      if (cap && frontier.size() > *cap) {
        reset(frontier);
        throw InvalidArgument("k-ball of node " + std::to_string(v) + " exceeds size cap " +
                              std::to_string(*cap));
      }
    }
    reset(frontier);
    std::sort(frontier.begin(), frontier.end());
    return ball;
  }

 private:
  static constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);

  void reset(const std::vector<NodeId>& touched) {
    for (NodeId u : touched) dist_[u] = kUnseen;
  }

  std::vector<std::size_t> dist_;
};

}  // namespace detail

inline void validate_hops(std::size_t k) {
  if (k == 0) throw InvalidArgument("subgraph depth k must be >= 1");
}

/// Breadth-first ball of radius k around v.
inline KBall k_ball(const Graph& g, NodeId v, std::size_t k,
                    std::optional<std::size_t> max_ball_size = std::nullopt) {
  validate_hops(k);
  if (v >= g.num_nodes()) {
    throw InvalidArgument("node " + std::to_string(v) + " out of range (" +
                          std::to_string(g.num_nodes()) + " nodes)");
  }
  detail::BallSearcher search(g.num_nodes());
  return search(g, v, k, max_ball_size);
}

/// Subgraph of g induced on ball.members, with ids compacted in member order.
inline EgoSubgraph induced_subgraph(const Graph& g, const KBall& ball) {
  const auto& members = ball.members;
  std::vector<Edge> local;
  for (std::size_t i = 0; i < members.size(); ++i) {
    // members is sorted, so neighbor intersection is a merge.
    auto nb = g.neighbors(members[i]);
    auto it = std::upper_bound(members.begin(), members.end(), members[i]);
    auto jt = std::upper_bound(nb.begin(), nb.end(), members[i]);
    while (it != members.end() && jt != nb.end()) {
      if (*it < *jt) {
        ++it;
      } else if (*jt < *it) {
        ++jt;
      } else {
        local.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(it - members.begin()));
        ++it;
        ++jt;
      }
    }
  }
  return {ball.center, Graph::from_edges(members.size(), local), members};
}

/// Ego subgraph for every node, indexed by node id.
inline std::vector<EgoSubgraph> extract_all(const Graph& g, std::size_t k, const ExtractOptions& opts = {}) {
  validate_hops(k);
  std::vector<EgoSubgraph> out(g.num_nodes());
  parallel_for_chunks(g.num_nodes(), opts.threads, [&](std::size_t begin, std::size_t end) {
    detail::BallSearcher search(g.num_nodes());
    for (std::size_t v = begin; v < end; ++v) {
      out[v] = induced_subgraph(g, search(g, static_cast<NodeId>(v), k, opts.max_ball_size));
    }
  });
  return out;
}

}  // namespace esgea
