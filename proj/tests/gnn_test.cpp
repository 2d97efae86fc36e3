#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "esgea/gnn/metrics.hpp"
#include "esgea/gnn/model.hpp"
#include "esgea/gnn/serialize.hpp"
#include "esgea/gnn/train.hpp"
#include "esgea/synth.hpp"
#include "oracles.hpp"

using namespace esgea;
using namespace esgea::gnn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Graph six_node_graph() {
  const std::vector<Edge> e = {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {1, 4}};
  return Graph::from_edges(6, e);
}

MpnnConfig small_config(Aggregator agg) {
  MpnnConfig c;
  c.num_layers = 2;
  c.hidden_dim = 5;
  c.aggregator = agg;
  c.seed = 3;
  return c;
}

double relative_error(const Matrix& a, const Matrix& b) {
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

void check_gradients(TrainedModel& model, const std::function<double(Gradients*)>& loss) {
  auto analytic = Gradients::zeros_like(model);
  loss(&analytic);
  auto params = model.parameters();
  auto grads = analytic.tensors();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Matrix numeric = oracle::finite_difference(*params[p], [&] { return loss(nullptr); });
    EXPECT_LT(relative_error(*grads[p], numeric), 1e-4) << "parameter tensor " << p;
  }
}

Split all_nodes_split(std::size_t n) {
  Split s;
  for (std::size_t i = 0; i < n; ++i) s.train.push_back(i);
  s.val = s.train;
  s.test = s.train;
  return s;
}

}  // namespace

TEST(Metrics, BinaryCrossEntropyExamples) {
  const double p1[] = {0.5};
  const double p2[] = {0.9};
  const int y1[] = {1};
  EXPECT_NEAR(binary_cross_entropy(p1, y1), 0.693147, 1e-6);
  EXPECT_NEAR(binary_cross_entropy(p2, y1), 0.105361, 1e-6);
  const double p0[] = {0.0};
  EXPECT_TRUE(std::isfinite(binary_cross_entropy(p0, y1)));
}

TEST(Metrics, SoftmaxCrossEntropyMatchesBinaryForTwoClasses) {
  const Matrix logits = random_matrix(8, 2, 1);
  const Matrix prob = softmax_rows(logits);
  std::vector<int> y = {0, 1, 1, 0, 1, 0, 0, 1};
  std::vector<std::size_t> rows(8);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<double> p1;
  for (Eigen::Index r = 0; r < 8; ++r) {
    EXPECT_NEAR(prob.row(r).sum(), 1.0, 1e-15);
    p1.push_back(prob(r, 1));
  }
  EXPECT_NEAR(softmax_cross_entropy(logits, y, rows).loss, binary_cross_entropy(p1, y), 1e-12);
}

TEST(Metrics, AucAndAccuracy) {
  const double perfect[] = {0.1, 0.2, 0.8, 0.9};
  const int y[] = {0, 0, 1, 1};
  EXPECT_EQ(evaluate_auc(perfect, y), 1.0);
  const double inverted[] = {0.9, 0.8, 0.2, 0.1};
  EXPECT_EQ(evaluate_auc(inverted, y), 0.0);
  const double ties[] = {0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(evaluate_auc(ties, y), 0.5);
  const int one_class[] = {1, 1, 1, 1};
  EXPECT_THROW(evaluate_auc(perfect, one_class), InvalidArgument);
  const int pred[] = {0, 1, 1, 1};
  EXPECT_EQ(evaluate_accuracy(pred, y), 0.75);
}

TEST(Metrics, MulticlassAuc) {
  Matrix prob(3, 3);
  prob << 0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8;
  const int y[] = {0, 1, 2};
  EXPECT_EQ(evaluate_multiclass_auc(prob, y), 1.0);
}

TEST(Gradients, NodeHeadAllAggregators) {
  const auto g = six_node_graph();
  const Matrix x = random_matrix(6, 3, 2);
  const std::vector<int> labels = {0, 1, 0, 1, 1, 0};
  const std::vector<std::size_t> rows = {0, 1, 3, 4, 5};
  for (auto agg : {Aggregator::gcn, Aggregator::mean, Aggregator::sum, Aggregator::max}) {
    auto model = TrainedModel::initialize(small_config(agg), 3, 2);
    model.head_bias = random_matrix(1, 2, 9);
    const Propagation prop(g, agg);
    check_gradients(model, [&](Gradients* grads) {
      return node_loss_and_gradients(prop, x, model, labels, rows, grads);
    });
  }
}

TEST(Gradients, GraphHeadBothReadouts) {
  const auto g = six_node_graph();
  const Matrix x = random_matrix(6, 3, 4);
  for (auto ro : {Readout::mean, Readout::sum}) {
    auto cfg = small_config(Aggregator::gcn);
    cfg.readout = ro;
    auto model = TrainedModel::initialize(cfg, 3, 3);
    const PreparedGraph pg{Propagation(g, cfg.aggregator), x};
    check_gradients(model, [&](Gradients* grads) { return graph_loss_and_gradients(pg, model, 2, 1.0, grads); });
  }
}

TEST(Model, ZeroInputGivesZeroEmbeddings) {
  const auto g = six_node_graph();
  const auto model = TrainedModel::initialize(small_config(Aggregator::gcn), 3, 2);
  const auto out = mpnn_forward(g, FeatureMatrix(6, 3), model);
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, PermutationEquivariance) {
  std::mt19937_64 rng(5);
  const auto g = oracle::random_graph(25, 0.2, rng);
  const auto perm = oracle::random_permutation(25, rng);
  const Matrix x = random_matrix(25, 4, 6);
  Matrix px(25, 4);
  for (std::size_t v = 0; v < 25; ++v) px.row(perm[v]) = x.row(static_cast<Eigen::Index>(v));
  for (auto agg : {Aggregator::gcn, Aggregator::mean, Aggregator::sum, Aggregator::max}) {
    auto cfg = small_config(agg);
    cfg.num_layers = 3;
    const auto model = TrainedModel::initialize(cfg, 4, 2);
    const auto a = mpnn_forward(g, FeatureMatrix(x), model);
    const auto b = mpnn_forward(g.permuted(perm), FeatureMatrix(px), model);
    for (std::size_t v = 0; v < 25; ++v) {
      EXPECT_LT((b.row(perm[v]) - a.row(static_cast<Eigen::Index>(v))).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Model, InputWidthMismatchThrows) {
  const auto g = six_node_graph();
  const auto model = TrainedModel::initialize(small_config(Aggregator::gcn), 3, 2);
  EXPECT_THROW(mpnn_forward(g, FeatureMatrix(6, 4), model), InvalidArgument);
  EXPECT_THROW(mpnn_forward(g, FeatureMatrix(5, 3), model), InvalidArgument);
  EXPECT_THROW(TrainedModel::initialize(small_config(Aggregator::gcn), 3, 1), InvalidArgument);
}

TEST(Split, StratifiedFractions) {
  std::vector<int> labels(100);
  for (std::size_t i = 0; i < 100; ++i) labels[i] = i < 50 ? 0 : 1;
  const auto s = stratified_split(labels, 1);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.val.size(), 8u);
  EXPECT_EQ(s.train.size(), 72u);
  std::size_t test_pos = 0;
  for (auto i : s.test) test_pos += labels[i];
  EXPECT_EQ(test_pos, 10u);
  const std::vector<int> one = {0, 0};
  EXPECT_THROW(stratified_split(one, 1).require_non_empty(), InvalidArgument);
}

TEST(NodeTraining, TwoCliquesReachPerfectAccuracy) {
  const auto g = synth::two_block({10, 10, 1.0, 1.0, 1, 1});
  const auto x = synth::community_indicator(g);
  const auto& labels = *g.node_labels;
  auto cfg = MpnnConfig::node_defaults();
  cfg.epochs = 100;
  const auto r = train_node_classifier(g, x, labels, stratified_split(labels, 0), cfg);
  EXPECT_EQ(r.test_accuracy, 1.0);
}

TEST(NodeTraining, LossDecreasesAndHistoryIsDeterministic) {
  const auto g = synth::two_block({30, 30, 0.3, 0.3, 3, 2});
  const auto x = synth::community_indicator(g);
  const auto& labels = *g.node_labels;
  auto cfg = MpnnConfig::node_defaults();
  cfg.epochs = 60;
  cfg.patience = 1000;
  const auto split = stratified_split(labels, 4);
  const auto a = train_node_classifier(g, x, labels, split, cfg);
  const auto b = train_node_classifier(g, x, labels, split, cfg);
  ASSERT_GE(a.model.history.size(), 50u);
  EXPECT_LT(a.model.history[49].train_loss, a.model.history[0].train_loss);
  EXPECT_EQ(a.model.history, b.model.history);
  EXPECT_EQ(a.model.layers, b.model.layers);
}

TEST(NodeTraining, ZeroEpochsGivesEmptyHistory) {
  const auto g = synth::two_block({10, 10, 1.0, 1.0, 1, 1});
  const auto& labels = *g.node_labels;
  auto cfg = MpnnConfig::node_defaults();
  cfg.epochs = 0;
  const auto r = train_node_classifier(g, synth::community_indicator(g), labels, stratified_split(labels, 0), cfg);
  EXPECT_TRUE(r.model.history.empty());
  EXPECT_EQ(r.epochs_run, 0u);
}

TEST(NodeTraining, RandomLabelsGiveChanceAccuracy) {
  const auto g = synth::gnp(200, 0.05, 8);
  const FeatureMatrix x(random_matrix(200, 8, 9));
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(100 + seed);
    std::vector<int> labels(200);
    for (auto& l : labels) l = static_cast<int>(rng() % 2);
    auto cfg = MpnnConfig::node_defaults();
    cfg.seed = seed;
    sum += train_node_classifier(g, x, labels, stratified_split(labels, seed), cfg).test_accuracy;
  }
  EXPECT_NEAR(sum / 10.0, 0.5, 0.15);
}

TEST(NodeTraining, MemorizesTrainingSet) {
  const auto g = synth::gnp(40, 0.1, 3);
  const FeatureMatrix x(random_matrix(40, 6, 4));
  std::mt19937_64 rng(5);
  std::vector<int> labels(40);
  for (auto& l : labels) l = static_cast<int>(rng() % 2);
  auto cfg = MpnnConfig::node_defaults();
  cfg.hidden_dim = 64;
  cfg.weight_decay = 0.0;
  cfg.epochs = 600;
  cfg.patience = 1000;
  const auto r = train_node_classifier(g, x, labels, all_nodes_split(40), cfg);
  EXPECT_GE(r.test_accuracy, 0.95);
}

TEST(GraphTraining, EsgeaFeaturesSeparateCycleFromSplitCycle) {
  const auto c = synth::cycle_vs_split_cycle(20, 60);
  const auto phi = build_graph_features(c, EsgeaFeatures{5, DescriptorConfig{}, {}});
  const auto deg = build_graph_features(c, DegreeOneHotFeatures{});
  auto cfg = MpnnConfig::graph_defaults();
  cfg.learning_rate = 0.01;
  cfg.batch_size = 16;
  const auto split = stratified_split(c.labels, 1);
  EXPECT_GE(train_graph_classifier(c, phi, split, cfg).test_auc, 0.95);
  EXPECT_NEAR(train_graph_classifier(c, deg, split, cfg).test_auc, 0.5, 1e-12);
}

TEST(GraphTraining, SingleClassCollectionRejected) {
  GraphCollection c;
  c.graphs = {synth::cycle(5), synth::cycle(6)};
  c.labels = {0, 0};
  const auto f = build_graph_features(c, DegreeOneHotFeatures{});
  Split s{{0}, {1}, {1}};
  EXPECT_THROW(train_graph_classifier(c, f, s, MpnnConfig::graph_defaults()), InvalidArgument);
}

TEST(GraphTraining, DegreeOneHotWidthAndClamp) {
  GraphCollection c;
  c.graphs = {synth::star(4), synth::path(3)};
  c.labels = {0, 1};
  const auto f = build_graph_features(c, DegreeOneHotFeatures{});
  EXPECT_EQ(f[0].cols(), 5u);
  EXPECT_EQ(f[0](0, 4), 1.0);
  const auto clamped = build_graph_features(c, DegreeOneHotFeatures{2});
  EXPECT_EQ(clamped[0].cols(), 3u);
  EXPECT_EQ(clamped[0](0, 2), 1.0);
}

TEST(Serialize, ModelRoundTrip) {
  auto cfg = small_config(Aggregator::max);
  cfg.readout = Readout::sum;
  auto m = TrainedModel::initialize(cfg, 4, 3);
  m.history.push_back({1, 0.5, 0.6});
  std::stringstream ss;
  write_model(ss, m);
  const auto r = read_model(ss);
  EXPECT_EQ(r.layers, m.layers);
  EXPECT_EQ(r.head_weight, m.head_weight);
  EXPECT_EQ(r.head_bias, m.head_bias);
  EXPECT_EQ(r.config.aggregator, Aggregator::max);
  EXPECT_EQ(r.config.readout, Readout::sum);
  EXPECT_EQ(r.input_dim, 4u);
  std::stringstream bad("NOTAMODEL");
  EXPECT_THROW(read_model(bad), DataError);
}

TEST(Serialize, MetricsJsonFields) {
  const std::vector<EpochRecord> h = {{1, 0.7, 0.8}, {2, 0.6, 0.7}};
  const auto j = metrics_json("node", 7, 2, 0.9, h);
  EXPECT_EQ(j["task"], "node");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["epochs_run"], 2);
  EXPECT_EQ(j["test_metric"], 0.9);
  ASSERT_EQ(j["per_epoch"].size(), 2u);
  EXPECT_EQ(j["per_epoch"][1]["val_loss"], 0.7);
}
