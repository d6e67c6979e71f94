/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ldpembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ldpembed/errors.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {
namespace {

std::map<std::string, double> LoadGolden(const std::string& name) {
  std::ifstream in(std::string(LDPEMBED_GOLDEN_DIR) + "/" + name);
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    out[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
  }
  return out;
}

TEST(AllocateCountsTest, Examples) {
  EXPECT_EQ(AllocateCounts(100, kNodeSplitRatios), (std::array<std::int64_t, 3>{50, 25, 25}));
  EXPECT_EQ(AllocateCounts(4, kNodeSplitRatios), (std::array<std::int64_t, 3>{2, 1, 1}));
  EXPECT_EQ(AllocateCounts(100, kEdgeSplitRatios), (std::array<std::int64_t, 3>{85, 5, 10}));
  EXPECT_EQ(AllocateCounts(0, kNodeSplitRatios), (std::array<std::int64_t, 3>{0, 0, 0}));
}

TEST(AllocateCountsTest, SumsToN) {
  for (std::int64_t n = 0; n < 300; ++n) {
    for (const auto& r : {kNodeSplitRatios, kEdgeSplitRatios, SplitRatios{0.6, 0.2, 0.2}}) {
      const auto c = AllocateCounts(n, r);
      EXPECT_EQ(c[0] + c[1] + c[2], n);
    }
  }
}

TEST(AllocateCountsTest, RejectsBadRatios) {
  EXPECT_THROW(AllocateCounts(10, {0.5, 0.3, 0.3}), ConfigError);
  EXPECT_THROW(AllocateCounts(10, {1.2, -0.1, -0.1}), ConfigError);
}

TEST(SplitNodesTest, PartitionAndDeterminism) {
  const Split a = SplitNodes(103, kNodeSplitRatios, 5);
  const Split b = SplitNodes(103, kNodeSplitRatios, 5);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  std::vector<std::int64_t> all;
  for (const auto* part : {&a.train, &a.val, &a.test}) all.insert(all.end(), part->begin(), part->end());
  std::sort(all.begin(), all.end());
  std::vector<std::int64_t> expected(103);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
  EXPECT_NE(SplitNodes(103, kNodeSplitRatios, 6).train, a.train);
}

TEST(SplitNodesTest, MembershipIsUniform) {
  const int n = 20;
  std::vector<int> in_train(n, 0);
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    for (auto v : SplitNodes(n, kNodeSplitRatios, t).train) ++in_train[v];
  }
  for (int c : in_train) EXPECT_NEAR(c / static_cast<double>(trials), 0.5, 0.04);
}

// Two Gaussian-free blobs: class 0 near (-2, -2), class 1 near (2, 2).
void Blobs(int n, FeatureMatrix& x, std::vector<int>& y) {
  RngStream rng(7, 0);
  x.resize(n, 2);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    const double center = y[i] ? 2.0 : -2.0;
    x(i, 0) = center + rng.Uniform(-1, 1);
    x(i, 1) = center + rng.Uniform(-1, 1);
  }
}

TEST(SoftmaxTest, SeparableBlobs) {
  FeatureMatrix x;
  std::vector<int> y;
  Blobs(200, x, y);
  const auto result = TrainSoftmax(x, y, SplitNodes(200, kNodeSplitRatios, 1));
  EXPECT_GE(result.test_accuracy, 0.98);
  EXPECT_TRUE(result.warnings.empty());
}

TEST(SoftmaxTest, ZeroFeaturesPredictMajority) {
  const int n = 120;
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 3 == 0 ? 1 : 0;
  const Split split = SplitNodes(n, kNodeSplitRatios, 2);
  const auto result = TrainSoftmax(FeatureMatrix::Zero(n, 4), y, split);
  int majority = 0;
  for (auto v : split.test) majority += y[v] == 0;
  EXPECT_DOUBLE_EQ(result.test_accuracy, majority / static_cast<double>(split.test.size()));
}

TEST(SoftmaxTest, GradientMatchesFiniteDifferences) {
  RngStream rng(3, 0);
  const int n = 9;
  const int d = 4;
  const int classes = 3;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform(-2, 2);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<int>(rng.UniformInt(classes));
  Eigen::MatrixXd w(d, classes);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.Uniform(-1, 1);
  Eigen::VectorXd b(classes);
  for (int c = 0; c < classes; ++c) b[c] = rng.Uniform(-1, 1);
  const double l2 = 0.3;

  Eigen::MatrixXd gw;
  Eigen::VectorXd gb;
  SoftmaxLoss(x, y, w, b, l2, &gw, &gb);
  const double h = 1e-5;
  auto rel = [](double a, double n) { return std::abs(a - n) / std::max({1e-3, std::abs(a), std::abs(n)}); };
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Eigen::MatrixXd wp = w;
    Eigen::MatrixXd wm = w;
    wp.data()[i] += h;
    wm.data()[i] -= h;
    const double fd = (SoftmaxLoss(x, y, wp, b, l2) - SoftmaxLoss(x, y, wm, b, l2)) / (2 * h);
    EXPECT_LE(rel(gw.data()[i], fd), 1e-6) << i;
  }
  for (int c = 0; c < classes; ++c) {
    Eigen::VectorXd bp = b;
    Eigen::VectorXd bm = b;
    bp[c] += h;
    bm[c] -= h;
    const double fd = (SoftmaxLoss(x, y, w, bp, l2) - SoftmaxLoss(x, y, w, bm, l2)) / (2 * h);
    EXPECT_LE(rel(gb[c], fd), 1e-6) << c;
  }
}

TEST(SoftmaxTest, LossDecreasesMonotonically) {
  FeatureMatrix x;
  std::vector<int> y;
  Blobs(60, x, y);
  for (int i = 0; i < 60; ++i) y[i] = (i % 3 == 0) ? 2 : y[i];
  TrainingHyper hyper;
  hyper.step = 0.05;
  hyper.iterations = 200;
  const auto result = TrainSoftmax(x, y, SplitNodes(60, kNodeSplitRatios, 4), hyper);
  const auto& loss = result.model.loss_history;
  ASSERT_GE(loss.size(), 2u);
  for (std::size_t i = 1; i < loss.size(); ++i) EXPECT_LE(loss[i], loss[i - 1]) << i;
}

TEST(SoftmaxTest, PredictionsInvariantToPositiveScaling) {
  FeatureMatrix x;
  std::vector<int> y;
  Blobs(200, x, y);
  const Split split = SplitNodes(200, kNodeSplitRatios, 5);
  const auto base = TrainSoftmax(x, y, split);
  for (double scale : {0.01, 3.0, 250.0}) {
    const FeatureMatrix scaled = scale * x;
    const auto other = TrainSoftmax(scaled, y, split);
    EXPECT_EQ(other.model.Predict(scaled), base.model.Predict(x)) << scale;
    EXPECT_EQ(other.test_accuracy, base.test_accuracy);
  }
}

TEST(SoftmaxTest, WarnsOnMissingClass) {
  FeatureMatrix x = FeatureMatrix::Zero(8, 1);
  std::vector<int> y{0, 0, 0, 0, 0, 0, 0, 2};
  Split split;
  split.train = {0, 1, 2, 3};
  split.val = {4, 5};
  split.test = {6, 7};
  const auto result = TrainSoftmax(x, y, split);
  EXPECT_EQ(result.warnings.size(), 2u);
}

TEST(SoftmaxTest, Errors) {
  FeatureMatrix x = FeatureMatrix::Zero(4, 1);
  std::vector<int> y{0, 1, -1, 0};
  Split split;
  split.train = {0, 1, 2};
  EXPECT_THROW(TrainSoftmax(x, y, split), InputError);
  split.train.clear();
  EXPECT_THROW(TrainSoftmax(x, y, split), InputError);
  EXPECT_THROW(TrainSoftmax(x, std::vector<int>{0}, split), InputError);
}

Graph Ring(NodeId n, int chords) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v < n; ++v) {
    for (int c = 1; c <= chords; ++c) edges.emplace_back(v, (v + c) % n);
  }
  return Graph::FromEdges(n, edges);
}

TEST(SplitEdgesTest, Sizes) {
  const Graph g = Ring(100, 1);
  ASSERT_EQ(g.num_edges(), 100);
  const EdgeSplit s = SplitEdges(g, kEdgeSplitRatios, 1);
  EXPECT_EQ(s.train.size(), 85u);
  EXPECT_EQ(s.val.size(), 5u);
  EXPECT_EQ(s.test.size(), 10u);
  EXPECT_EQ(s.train_neg.size(), 85u);
  EXPECT_EQ(s.val_neg.size(), 5u);
  EXPECT_EQ(s.test_neg.size(), 10u);
  EXPECT_EQ(s.train_graph.num_edges(), 85);
  EXPECT_EQ(s.train_graph.num_nodes(), 100);
  for (const auto& [u, v] : s.train) EXPECT_TRUE(s.train_graph.HasEdge(u, v));
  for (const auto& [u, v] : s.test) EXPECT_FALSE(s.train_graph.HasEdge(u, v));
}

TEST(SplitEdgesTest, NegativesNeverCollide) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const Graph& g : {Ring(30, 5), ErdosRenyi(200, 0.05, seed)}) {
      const EdgeSplit s = SplitEdges(g, kEdgeSplitRatios, seed);
      std::set<Edge> seen;
      for (const auto* part : {&s.train_neg, &s.val_neg, &s.test_neg}) {
        for (const auto& [u, v] : *part) {
          ASSERT_NE(u, v);
          ASSERT_FALSE(g.HasEdge(u, v));
          ASSERT_TRUE(seen.insert({std::min(u, v), std::max(u, v)}).second);
        }
      }
    }
  }
}

TEST(SplitEdgesTest, Deterministic) {
  const Graph g = ErdosRenyi(100, 0.05, 3);
  const EdgeSplit a = SplitEdges(g, kEdgeSplitRatios, 9);
  const EdgeSplit b = SplitEdges(g, kEdgeSplitRatios, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.test_neg, b.test_neg);
  EXPECT_EQ(a.train_graph, b.train_graph);
}

TEST(SplitEdgesTest, Errors) {
  EXPECT_THROW(SplitEdges(Ring(5, 1), kEdgeSplitRatios, 1), ConfigError);
  // Complete graph: no non-edges to sample.
  EXPECT_THROW(SplitEdges(Ring(12, 6), kEdgeSplitRatios, 1), ConfigError);
}

TEST(AucTest, PerfectSeparation) {
  const std::vector<double> pos{3, 4, 5};
  const std::vector<double> neg{0, 1, 2.5};
  EXPECT_EQ(Auc(pos, neg), 1.0);
  EXPECT_EQ(Auc(neg, pos), 0.0);
}

TEST(AucTest, TiesCountHalf) {
  const std::vector<double> pos{1, 1};
  const std::vector<double> neg{1, 1, 1};
  EXPECT_EQ(Auc(pos, neg), 0.5);
  EXPECT_DOUBLE_EQ(Auc(std::vector<double>{2, 1}, std::vector<double>{1}), 0.75);
}

TEST(AucTest, RandomScoresNearHalf) {
  RngStream rng(11, 0);
  std::vector<double> pos(1000);
  std::vector<double> neg(1000);
  for (auto& v : pos) v = rng.Uniform();
  for (auto& v : neg) v = rng.Uniform();
  EXPECT_NEAR(Auc(pos, neg), 0.5, 0.05);
}

TEST(AucTest, InvariantUnderMonotoneTransform) {
  RngStream rng(12, 0);
  std::vector<double> pos(300);
  std::vector<double> neg(200);
  for (auto& v : pos) v = rng.Uniform(-1, 2);
  for (auto& v : neg) v = rng.Uniform(-2, 1);
  const double base = Auc(pos, neg);
  auto transform = [](std::vector<double> v) {
    for (auto& s : v) s = std::exp(3 * s) - 7;
    return v;
  };
  EXPECT_DOUBLE_EQ(Auc(transform(pos), transform(neg)), base);
}

TEST(AucTest, EmptySideThrows) {
  EXPECT_THROW(Auc(std::vector<double>{}, std::vector<double>{1}), InputError);
  EXPECT_THROW(Auc(std::vector<double>{1}, std::vector<double>{}), InputError);
}

TEST(HadamardTest, Rows) {
  FeatureMatrix z(3, 2);
  z << 1, 2, 3, 4, 5, 6;
  const std::vector<Edge> edges{{0, 2}, {1, 1}};
  Eigen::MatrixXd expected(2, 2);
  expected << 5, 12, 9, 16;
  EXPECT_EQ(HadamardFeatures(z, edges), expected);
}

TEST(LinkPredictTest, StrongCommunitiesApproachBlockCeiling) {
  SbmConfig config;
  config.n = 400;
  config.classes = 16;
  config.p_in = 0.3;
  config.p_out = 0.0;
  config.feature_shift = 1.0;
  config.noise = 0.0;
  const SbmDataset data = GenerateSbm(config, 3);
  const EdgeSplit split = SplitEdges(data.graph, kEdgeSplitRatios, 4);
  const LinkResult result = LinkPredict(data.features, split);
  // Same-class negatives tie with positives, capping the AUC near 1 - 1/(2C).
  EXPECT_GE(result.test_auc, 0.9);
  EXPECT_FALSE(result.loss_history.empty());
}

TEST(SbmTest, NoInterClassEdgesWhenPOutZero) {
  SbmConfig config;
  config.n = 300;
  config.p_out = 0.0;
  config.p_in = 0.1;
  const SbmDataset data = GenerateSbm(config, 1);
  EXPECT_GT(data.graph.num_edges(), 0);
  for (const auto& [u, v] : data.graph.Edges()) EXPECT_EQ(data.labels[u], data.labels[v]);
}

TEST(SbmTest, ExpectedEdgeCounts) {
  SbmConfig config;
  const SbmDataset data = GenerateSbm(config, 2);
  std::int64_t intra = 0;
  std::int64_t inter = 0;
  for (const auto& [u, v] : data.graph.Edges()) (data.labels[u] == data.labels[v] ? intra : inter)++;
  // 4 * C(250, 2) * 0.02 = 2490 and 6 * 250^2 * 0.002 = 750.
  EXPECT_NEAR(intra, 2490, 4 * std::sqrt(2490.0));
  EXPECT_NEAR(inter, 750, 4 * std::sqrt(750.0));
  EXPECT_EQ(data.features.rows(), 1000);
  EXPECT_EQ(data.features.cols(), 64);
  EXPECT_LE(data.features.cwiseAbs().maxCoeff(), 1.0);
  std::vector<int> per_class(4, 0);
  for (int l : data.labels) ++per_class[l];
  EXPECT_EQ(per_class, (std::vector<int>{250, 250, 250, 250}));
}

TEST(SbmTest, CleanFeaturesClassifyPerfectly) {
  SbmConfig config;
  config.n = 400;
  config.feature_shift = 1.0;
  config.noise = 0.0;
  const SbmDataset data = GenerateSbm(config, 3);
  const auto result = TrainSoftmax(data.features, data.labels,
                                   SplitNodes(config.n, kNodeSplitRatios, 1));
  EXPECT_EQ(result.test_accuracy, 1.0);
}

TEST(SbmTest, Deterministic) {
  const SbmDataset a = GenerateSbm({}, kGoldenSbmSeed);
  const SbmDataset b = GenerateSbm({}, kGoldenSbmSeed);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(GenerateSbm({}, kGoldenSbmSeed + 1).graph, a.graph);
}

TEST(SbmTest, RejectsBadConfig) {
  SbmConfig config;
  config.p_in = 1.5;
  EXPECT_THROW(GenerateSbm(config, 1), InputError);
  config = SbmConfig{};
  config.classes = 0;
  EXPECT_THROW(GenerateSbm(config, 1), InputError);
}

TEST(ErdosRenyiTest, EdgeCountAndExtremes) {
  const Graph g = ErdosRenyi(500, 0.02, 1);
  const double expected = 0.02 * 500 * 499 / 2;
  EXPECT_NEAR(g.num_edges(), expected, 4 * std::sqrt(expected));
  EXPECT_EQ(ErdosRenyi(50, 0.0, 1).num_edges(), 0);
  EXPECT_EQ(ErdosRenyi(50, 1.0, 1).num_edges(), 50 * 49 / 2);
}

MechanismSpec Identity() { return {MechanismKind::kIdentity, INFINITY, 1}; }

TEST(PipelineTest, IdentityMatchesNonPrivateComputation) {
  const SbmDataset data = GenerateSbm({}, kGoldenSbmSeed);
  const PipelineOptions options;
  const double a = RunNodeClassification(data.graph, data.features, data.labels, Identity(),
                                         options, 42);
  const double b = RunNodeClassification(data.graph, data.features, data.labels, Identity(),
                                         options, 42);
  EXPECT_EQ(a, b);
  std::vector<std::int64_t> ids(1000);
  std::iota(ids.begin(), ids.end(), 0);
  const Split split = SplitIds(ids, kNodeSplitRatios, DeriveSeed(42, 1));
  const FeatureMatrix z = BackwardPush(data.graph, data.features, options.propagation);
  EXPECT_EQ(a, TrainSoftmax(z, data.labels, split).test_accuracy);
}

TEST(PipelineTest, GoldenNonPrivateAccuracy) {
  const auto golden = LoadGolden("sbm_golden.txt");
  const SbmDataset data = GenerateSbm({}, kGoldenSbmSeed);
  double sum = 0;
  for (int run = 0; run < 10; ++run) {
    sum += RunNodeClassification(data.graph, data.features, data.labels, Identity(), {},
                                 DeriveSeed(0, run));
  }
  EXPECT_GE(sum / 10, 0.85);
  EXPECT_NEAR(sum / 10, golden.at("node_accuracy_non_private"), 0.01);
}

TEST(PipelineTest, GoldenNonPrivateLinkAuc) {
  const auto golden = LoadGolden("sbm_golden.txt");
  const SbmDataset data = GenerateSbm({}, kGoldenSbmSeed);
  double sum = 0;
  for (int run = 0; run < 10; ++run) {
    sum += RunLinkPrediction(data.graph, data.features, Identity(), {}, DeriveSeed(0, run));
  }
  EXPECT_NEAR(sum / 10, golden.at("link_auc_non_private"), 0.01);
  // No scorer can beat the block-model ceiling on this dataset.
  EXPECT_LE(sum / 10, golden.at("link_auc_block_ceiling") + 0.03);
}

TEST(PipelineTest, SkipsUnlabelledNodes) {
  SbmDataset data = GenerateSbm({}, kGoldenSbmSeed);
  for (std::size_t v = 0; v < data.labels.size(); v += 3) data.labels[v] = -1;
  const double acc = RunNodeClassification(data.graph, data.features, data.labels, Identity(),
                                           {}, 1);
  EXPECT_GT(acc, 0.85);
}

}  // namespace
}  // namespace ldpembed
