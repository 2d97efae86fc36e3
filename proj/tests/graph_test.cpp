#include <random>

#include <gtest/gtest.h>

#include "esgea/graph.hpp"
#include "esgea/synth.hpp"
#include "oracles.hpp"

using namespace esgea;

TEST(Graph, FromEdgesSymmetrizesAndDeduplicates) {
  const std::vector<Edge> e = {{0, 0}, {0, 1}, {1, 0}, {2, 1}};
  const auto g = Graph::from_edges(3, e);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 0));
  const auto nb = g.neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 2}));
}

TEST(Graph, RejectsOutOfRangeEdge) {
  const std::vector<Edge> e = {{0, 3}};
  EXPECT_THROW(Graph::from_edges(3, e), InvalidArgument);
}

TEST(Graph, InvariantsHoldOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_graph(1 + trial % 30, 0.3, rng);
    std::size_t degree_sum = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto nb = g.neighbors(v);
      degree_sum += nb.size();
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
      for (NodeId u : nb) {
        EXPECT_NE(u, v);
        EXPECT_TRUE(g.has_edge(u, v));
      }
    }
    EXPECT_EQ(degree_sum, 2 * g.num_edges());
    EXPECT_EQ(count_components(g), oracle::components(g));
  }
}

TEST(Graph, PermutedKeepsStructure) {
  const auto g = synth::path(4);
  const std::vector<NodeId> perm = {3, 2, 1, 0};
  const auto h = g.permuted(perm);
  EXPECT_TRUE(h.has_edge(3, 2));
  EXPECT_TRUE(h.has_edge(1, 0));
  EXPECT_EQ(h.num_edges(), 3u);
}

TEST(DegreeOneHot, PathOnThreeNodes) {
  const auto x = degree_one_hot(synth::path(3), 2);
  Matrix want(3, 3);
  want << 0, 1, 0, 0, 0, 1, 0, 1, 0;
  EXPECT_EQ(x.values(), want);
}

TEST(DegreeOneHot, IsolatedNode) {
  const auto g = Graph::from_edges(1, {});
  const auto x = degree_one_hot(g, 3);
  EXPECT_EQ(x.cols(), 4u);
  EXPECT_EQ(x(0, 0), 1.0);
  EXPECT_EQ(x.values().sum(), 1.0);
}

TEST(DegreeOneHot, FourCycleIsTwoRegular) {
  const auto x = degree_one_hot(synth::cycle(4), 2);
  for (std::size_t v = 0; v < 4; ++v) {
    EXPECT_EQ(x(v, 0), 0.0);
    EXPECT_EQ(x(v, 1), 0.0);
    EXPECT_EQ(x(v, 2), 1.0);
  }
}

TEST(DegreeOneHot, OverflowNeedsClamp) {
  const auto g = synth::star(4);
  EXPECT_THROW(degree_one_hot(g, 2), InvalidArgument);
  const auto x = degree_one_hot(g, 2, true);
  EXPECT_EQ(x(0, 2), 1.0);
}

TEST(FeatureMatrix, RejectsNonFinite) {
  Matrix m(1, 2);
  m << 1.0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(FeatureMatrix{m}, DataError);
}

TEST(GraphCollection, Validation) {
  GraphCollection c;
  EXPECT_THROW(c.validate(), DataError);
  c.graphs = {synth::path(2), synth::path(3)};
  c.labels = {0, 2};
  EXPECT_THROW(c.validate(), DataError);
  c.labels = {1, 0};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.num_classes(), 2u);
}
