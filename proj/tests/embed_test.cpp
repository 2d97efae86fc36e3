#include <random>

#include <gtest/gtest.h>

#include "esgea/embed.hpp"
#include "esgea/synth.hpp"
#include "oracles.hpp"

using namespace esgea;

namespace {

void expect_rows_equal(const FeatureMatrix& m, std::size_t a, std::size_t b, double tol = 1e-10) {
  for (std::size_t c = 0; c < m.cols(); ++c) EXPECT_NEAR(m(a, c), m(b, c), tol) << "rows " << a << "," << b;
}

}  // namespace

TEST(EmbedSubgraphs, FourCycleRowsIdentical) {
  const auto phi = embed_subgraphs(synth::cycle(4), 1, DescriptorConfig{});
  ASSERT_EQ(phi.rows(), 4u);
  ASSERT_EQ(phi.cols(), 20u);
  for (std::size_t v = 1; v < 4; ++v) expect_rows_equal(phi, 0, v, 0.0);
}

TEST(EmbedSubgraphs, RowMatchesInducedBallDescriptor) {
  const auto g = synth::gnp(40, 0.1, 7);
  const DescriptorConfig cfg;
  const auto phi = embed_subgraphs(g, 2, cfg);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto sub = induced_subgraph(g, k_ball(g, v, 2));
    const auto want = describe_graph(sub.local_graph, cfg).values;
    for (std::size_t c = 0; c < want.size(); ++c) EXPECT_EQ(phi(v, c), want[c]);
  }
}

TEST(EmbedSubgraphs, StarLeavesShareRows) {
  const auto phi = embed_subgraphs(synth::star(5), 1, DescriptorConfig{});
  for (std::size_t v = 2; v <= 5; ++v) expect_rows_equal(phi, 1, v);
  // Leaf subgraph is K2, hub subgraph is the full star.
  EXPECT_NEAR(phi(1, 0), heat_trace(eigendecompose(build_laplacian(synth::complete(2))),
                                    default_time_grid())
                             .values[0],
              1e-12);
}

TEST(EmbedSubgraphs, PermutationEquivariance) {
  std::mt19937_64 rng(11);
  const DescriptorConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = oracle::random_graph(30, 0.12, rng);
    const auto perm = oracle::random_permutation(g.num_nodes(), rng);
    const auto a = embed_subgraphs(g, 2, cfg);
    const auto b = embed_subgraphs(g.permuted(perm), 2, cfg);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_NEAR(b(perm[v], c), a(v, c), 1e-8 * a(v, c));
    }
  }
}

TEST(EmbedSubgraphs, DeterministicAcrossThreadCounts) {
  const auto g = synth::gnp(120, 0.05, 9);
  const DescriptorConfig cfg;
  const auto one = embed_subgraphs(g, 2, cfg, {1, std::nullopt});
  for (std::size_t threads : {2u, 3u, 8u}) {
    EXPECT_EQ(embed_subgraphs(g, 2, cfg, {threads, std::nullopt}), one);
  }
}

TEST(EmbedSubgraphs, NormalizationDividesByBallSize) {
  const auto g = synth::star(4);
  DescriptorConfig raw;
  DescriptorConfig norm;
  norm.normalization = Normalization::by_node_count;
  const auto a = embed_subgraphs(g, 1, raw);
  const auto b = embed_subgraphs(g, 1, norm);
  for (std::size_t c = 0; c < a.cols(); ++c) {
    EXPECT_NEAR(b(0, c), a(0, c) / 5.0, 1e-15);
    EXPECT_NEAR(b(1, c), a(1, c) / 2.0, 1e-15);
  }
}

TEST(EmbedSubgraphs, IsolatedNodeRowIsOne) {
  const std::vector<Edge> e = {{0, 1}};
  const auto phi = embed_subgraphs(Graph::from_edges(3, e), 2, DescriptorConfig{});
  for (std::size_t c = 0; c < phi.cols(); ++c) EXPECT_EQ(phi(2, c), 1.0);
}

TEST(EmbedSubgraphs, WaveKernelAndNormalizedLaplacian) {
  DescriptorConfig cfg;
  cfg.kernel = KernelKind::wave;
  cfg.laplacian = LaplacianVariant::symmetric_normalized;
  const auto phi = embed_subgraphs(synth::cycle(6), 2, cfg);
  for (std::size_t v = 1; v < 6; ++v) expect_rows_equal(phi, 0, v);
  for (std::size_t c = 0; c < phi.cols(); ++c) EXPECT_LE(phi(0, c), 5.0 + 1e-12);
}

TEST(EmbedSubgraphs, RejectsZeroHopsAndCap) {
  const auto g = synth::star(10);
  EXPECT_THROW(embed_subgraphs(g, 0, DescriptorConfig{}), InvalidArgument);
  EmbedOptions capped;
  capped.max_ball_size = 5;
  EXPECT_THROW(embed_subgraphs(g, 1, DescriptorConfig{}, capped), InvalidArgument);
}
