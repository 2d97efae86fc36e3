#pragma once

#include <cmath>
#include <string_view>

#include <Eigen/Dense>

#include "esgea/error.hpp"
#include "esgea/graph.hpp"

namespace esgea {

enum class LaplacianVariant { unnormalized, symmetric_normalized };

inline LaplacianVariant parse_laplacian_variant(std::string_view s) {
  if (s == "unnormalized" || s == "combinatorial") return LaplacianVariant::unnormalized;
  if (s == "normalized" || s == "symmetric-normalized" || s == "sym") {
    return LaplacianVariant::symmetric_normalized;
  }
  throw InvalidArgument("unknown laplacian variant '" + std::string(s) + "'");
}

inline std::string_view to_string(LaplacianVariant v) {
  return v == LaplacianVariant::unnormalized ? "unnormalized" : "normalized";
}

/// Dense symmetric Laplacian of a (subgraph-scale) graph.
struct LaplacianMatrix {
  LaplacianVariant variant = LaplacianVariant::unnormalized;
  Eigen::MatrixXd matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

/// L = D - A, or L = I - D^-1/2 A D^-1/2. Isolated nodes get an all-zero
/// row and column in the normalized variant.
inline LaplacianMatrix build_laplacian(const Graph& g,
                                       LaplacianVariant variant = LaplacianVariant::unnormalized) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (n == 0) throw InvalidArgument("build_laplacian: empty graph");
  LaplacianMatrix lap{variant, Eigen::MatrixXd::Zero(n, n)};
  auto& m = lap.matrix;

  if (variant == LaplacianVariant::unnormalized) {
    for (NodeId v = 0; v < n; ++v) {
      m(v, v) = static_cast<double>(g.degree(v));
      for (NodeId u : g.neighbors(v)) m(v, u) = -1.0;
    }
    return lap;
  }

  Eigen::VectorXd inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto d = g.degree(v);
    inv_sqrt(v) = d == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(d));
  }
  for (NodeId v = 0; v < n; ++v) {
    if (g.degree(v) == 0) continue;
    m(v, v) = 1.0;
    for (NodeId u : g.neighbors(v)) m(v, u) = -inv_sqrt(v) * inv_sqrt(u);
  }
  return lap;
}

}  // namespace esgea
