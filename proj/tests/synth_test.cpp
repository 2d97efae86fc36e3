#include <gtest/gtest.h>

#include "esgea/synth.hpp"

using namespace esgea;

TEST(Synth, BasicFamilies) {
  const auto c = synth::cycle(7);
  EXPECT_EQ(c.num_edges(), 7u);
  for (NodeId v = 0; v < 7; ++v) EXPECT_EQ(c.degree(v), 2u);
  EXPECT_EQ(synth::path(5).num_edges(), 4u);
  const auto s = synth::star(6);
  EXPECT_EQ(s.num_nodes(), 7u);
  EXPECT_EQ(s.degree(0), 6u);
  EXPECT_EQ(synth::complete(6).num_edges(), 15u);
  EXPECT_THROW(synth::cycle(2), InvalidArgument);
}

TEST(Synth, RandomTreeIsConnectedAcyclic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = synth::random_tree(30, seed);
    EXPECT_EQ(t.num_edges(), 29u);
    EXPECT_EQ(count_components(t), 1u);
  }
}

TEST(Synth, GnpSeededAndDensity) {
  EXPECT_EQ(synth::gnp(80, 0.1, 5), synth::gnp(80, 0.1, 5));
  EXPECT_FALSE(synth::gnp(80, 0.1, 5) == synth::gnp(80, 0.1, 6));
  const auto g = synth::gnp(200, 0.1, 1);
  const double expected = 0.1 * 200 * 199 / 2;
  EXPECT_NEAR(static_cast<double>(g.num_edges()), expected, 0.1 * expected);
  EXPECT_EQ(synth::gnp(10, 0.0, 1).num_edges(), 0u);
  EXPECT_EQ(synth::gnp(10, 1.0, 1).num_edges(), 45u);
  EXPECT_THROW(synth::gnp(10, 1.5, 1), InvalidArgument);
}

TEST(Synth, TwoBlockLabelsAndBridges) {
  synth::TwoBlockSpec spec{10, 12, 1.0, 1.0, 3, 4};
  const auto g = synth::two_block(spec);
  ASSERT_TRUE(g.node_labels);
  EXPECT_EQ(g.num_nodes(), 22u);
  EXPECT_EQ(g.num_edges(), 45u + 66u + 3u);
  std::size_t crossing = 0;
  for (auto [u, v] : g.edges()) crossing += ((*g.node_labels)[u] != (*g.node_labels)[v]);
  EXPECT_EQ(crossing, 3u);
  const auto x = synth::community_indicator(g);
  EXPECT_EQ(x.cols(), 2u);
  EXPECT_EQ(x(0, 0), 1.0);
  EXPECT_EQ(x(21, 1), 1.0);
}

TEST(Synth, CycleVsSplitCycle) {
  const auto c = synth::cycle_vs_split_cycle(12, 6);
  c.validate();
  EXPECT_EQ(c.labels, (std::vector<int>{0, 1, 0, 1, 0, 1}));
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.graphs[i].num_nodes(), 12u);
    EXPECT_EQ(count_components(c.graphs[i]), c.labels[i] == 0 ? 1u : 2u);
  }
  EXPECT_THROW(synth::cycle_vs_split_cycle(7, 4), InvalidArgument);
}

TEST(Synth, GeneratorDispatch) {
  synth::GeneratorSpec s;
  s.family = synth::parse_family("star");
  s.n = 4;
  EXPECT_EQ(synth::generate_graph(s).num_nodes(), 5u);
  s.family = synth::parse_family("cycle-vs-split-cycle");
  s.n = 8;
  s.count = 4;
  EXPECT_EQ(synth::generate_collection(s).size(), 4u);
  EXPECT_THROW(synth::generate_graph(s), InvalidArgument);
  EXPECT_THROW(synth::parse_family("lattice"), InvalidArgument);
}
