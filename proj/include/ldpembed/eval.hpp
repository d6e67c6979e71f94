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
#ifndef LDPEMBED_EVAL_HPP_
#define LDPEMBED_EVAL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldpembed/features.hpp"
#include "ldpembed/graph.hpp"
#include "ldpembed/mechanisms.hpp"
#include "ldpembed/propagation.hpp"

namespace ldpembed {

struct SplitRatios {
  double train;
  double val;
  double test;
};

inline constexpr SplitRatios kNodeSplitRatios{0.5, 0.25, 0.25};
inline constexpr SplitRatios kEdgeSplitRatios{0.85, 0.05, 0.10};

// Group sizes for `n` items by the largest-remainder rule (ties go to the
// earlier group). Throws ConfigError unless the ratios are non-negative and
// sum to 1.
std::array<std::int64_t, 3> AllocateCounts(std::int64_t n, const SplitRatios& ratios);

struct Split {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
  std::vector<std::int64_t> test;
  std::uint64_t seed = 0;
};

// Uniformly random partition of [0, n).
Split SplitNodes(std::int64_t n, const SplitRatios& ratios, std::uint64_t seed);
// Same, over an explicit population of ids.
Split SplitIds(std::span<const std::int64_t> ids, const SplitRatios& ratios,
               std::uint64_t seed);

struct TrainingHyper {
  double step = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  // Standardize each input column with training-set mean and deviation.
  bool standardize = true;
};

struct LinearModel {
  Eigen::MatrixXd weights;  // d x C
  Eigen::VectorXd bias;     // C
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  std::vector<double> loss_history;

  Eigen::MatrixXd Scores(const Eigen::MatrixXd& features) const;
  std::vector<int> Predict(const Eigen::MatrixXd& features) const;
};

// Mean softmax cross-entropy over rows plus (l2 / 2) ||W||_F^2. Gradients
// are written when the output pointers are non-null.
double SoftmaxLoss(const Eigen::MatrixXd& features, std::span<const int> labels,
                   const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias, double l2,
                   Eigen::MatrixXd* grad_weights = nullptr,
                   Eigen::VectorXd* grad_bias = nullptr);

struct ClassificationResult {
  LinearModel model;
  double test_accuracy = 0;
  double val_accuracy = 0;
  std::vector<std::string> warnings;
};

// Full-batch gradient descent on the training indices. Classes are
// 0 .. max label; a class absent from training produces a warning.
ClassificationResult TrainSoftmax(const FeatureMatrix& z, std::span<const int> labels,
                                  const Split& split, const TrainingHyper& hyper = {});

struct EdgeSplit {
  std::vector<Edge> train, val, test;
  std::vector<Edge> train_neg, val_neg, test_neg;
  Graph train_graph;  // all nodes, training edges only
  std::uint64_t seed = 0;
};

// Partitions the edges and draws, per group, as many distinct uniformly
// random non-edges as positives. Throws ConfigError when the graph has
// fewer than 10 edges or too few non-edges.
EdgeSplit SplitEdges(const Graph& g, const SplitRatios& ratios, std::uint64_t seed);

// Row i is z(u_i) .* z(v_i).
Eigen::MatrixXd HadamardFeatures(const FeatureMatrix& z, std::span<const Edge> edges);

// Mann-Whitney estimate of P(pos > neg) with ties counted as 1/2. Throws
// InputError when either side is empty.
double Auc(std::span<const double> positive, std::span<const double> negative);

struct LinkResult {
  Eigen::VectorXd weights;
  double test_auc = 0;
  double val_auc = 0;
  std::vector<double> loss_history;
};

// Logistic model on Hadamard edge features trained with the pairwise loss
// log(1 + exp(-w . (f_pos - f_neg))) over (positive, negative) pairs.
LinkResult LinkPredict(const FeatureMatrix& z, const EdgeSplit& split,
                       const TrainingHyper& hyper = {});

// Stochastic block model with class-indicator features. Node v belongs to
// class floor(v * classes / n). Feature j of a class-c node is
// +shift when j % classes == c and -shift otherwise, plus U(-noise, noise),
// clamped to [-1, 1]. noise < 0 means 1 - shift.
struct SbmConfig {
  std::int64_t n = 1000;
  int classes = 4;
  double p_in = 0.02;
  double p_out = 0.002;
  int d = 64;
  double feature_shift = 0.5;
  double noise = -1.0;
};

struct SbmDataset {
  Graph graph;
  FeatureMatrix features;
  std::vector<int> labels;
};

SbmDataset GenerateSbm(const SbmConfig& config, std::uint64_t seed);

// Seed of the reference SBM dataset used by the end-to-end checks.
inline constexpr std::uint64_t kGoldenSbmSeed = 20240601;

// G(n, p) by geometric skipping.
Graph ErdosRenyi(NodeId n, double p, std::uint64_t seed);

// One seeded node-classification run: split nodes, perturb every row,
// propagate, train on the training split. The split and perturbation seeds
// derive from `run_seed` only, so different mechanisms share a split.
struct PipelineOptions {
  PropagationParams<double> propagation{};
  TrainingHyper hyper{};
  SplitRatios node_ratios = kNodeSplitRatios;
  SplitRatios edge_ratios = kEdgeSplitRatios;
  int threads = 0;
};

double RunNodeClassification(const Graph& g, const FeatureMatrix& features,
                             std::span<const int> labels, const MechanismSpec& spec,
                             const PipelineOptions& options, std::uint64_t run_seed);

// Link prediction run: split edges, perturb, propagate over the training
// graph, score held-out pairs.
double RunLinkPrediction(const Graph& g, const FeatureMatrix& features,
                         const MechanismSpec& spec, const PipelineOptions& options,
                         std::uint64_t run_seed);

}  // namespace ldpembed

#endif  // LDPEMBED_EVAL_HPP_
