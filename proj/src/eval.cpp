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
#include <numeric>
#include <unordered_set>

#include "ldpembed/errors.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {

std::array<std::int64_t, 3> AllocateCounts(std::int64_t n, const SplitRatios& ratios) {
  const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
  for (double x : r) {
    if (!(x >= 0)) throw ConfigError("split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
  std::array<std::int64_t, 3> counts{};
  std::array<double, 3> frac{};
  std::int64_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(n);
    // Guard against 0.85 * 100 = 84.99999...
    counts[i] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
    frac[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int i = 0; assigned < n; i = (i + 1) % 3, ++assigned) ++counts[order[i]];
  return counts;
}

Split SplitIds(std::span<const std::int64_t> ids, const SplitRatios& ratios,
               std::uint64_t seed) {
  const auto counts = AllocateCounts(static_cast<std::int64_t>(ids.size()), ratios);
  std::vector<std::int64_t> perm(ids.begin(), ids.end());
  RngStream rng(seed, 0);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.UniformInt(i)]);
  }
  Split split;
  split.seed = seed;
  auto first = perm.begin();
  split.train.assign(first, first + counts[0]);
  split.val.assign(first + counts[0], first + counts[0] + counts[1]);
  split.test.assign(first + counts[0] + counts[1], perm.end());
  for (auto* part : {&split.train, &split.val, &split.test}) {
    std::sort(part->begin(), part->end());
  }
  return split;
}

Split SplitNodes(std::int64_t n, const SplitRatios& ratios, std::uint64_t seed) {
  if (n < 0) throw InputError("negative node count");
  std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  return SplitIds(ids, ratios, seed);
}

// ---------------------------------------------------------------------------
// Softmax classification

namespace {

Eigen::MatrixXd Gather(const FeatureMatrix& z, std::span<const std::int64_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), z.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = z.row(rows[i]);
  return out;
}

void FitStandardizer(const Eigen::MatrixXd& x, bool enabled, Eigen::RowVectorXd& center,
                     Eigen::RowVectorXd& scale) {
  center = Eigen::RowVectorXd::Zero(x.cols());
  scale = Eigen::RowVectorXd::Ones(x.cols());
  if (!enabled || x.rows() == 0) return;
  center = x.colwise().mean();
  const Eigen::RowVectorXd var =
      (x.rowwise() - center).array().square().colwise().mean().matrix();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    scale[j] = var[j] > 0 ? std::sqrt(var[j]) : 1.0;
  }
}

Eigen::MatrixXd Standardize(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& center,
                            const Eigen::RowVectorXd& scale) {
  return (x.rowwise() - center).array().rowwise() / scale.array();
}

int ArgMax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return static_cast<int>(best);
}

double Accuracy(const LinearModel& model, const FeatureMatrix& z, std::span<const int> labels,
                std::span<const std::int64_t> rows) {
  if (rows.empty()) return 0.0;
  const auto pred = model.Predict(Gather(z, rows));
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hits += pred[i] == labels[rows[i]];
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

}  // namespace

Eigen::MatrixXd LinearModel::Scores(const Eigen::MatrixXd& features) const {
  return (Standardize(features, center, scale) * weights).rowwise() + bias.transpose();
}

std::vector<int> LinearModel::Predict(const Eigen::MatrixXd& features) const {
  const Eigen::MatrixXd s = Scores(features);
  std::vector<int> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) out[i] = ArgMax(s.row(i));
  return out;
}

double SoftmaxLoss(const Eigen::MatrixXd& features, std::span<const int> labels,
                   const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias, double l2,
                   Eigen::MatrixXd* grad_weights, Eigen::VectorXd* grad_bias) {
  const Eigen::Index m = features.rows();
  if (static_cast<Eigen::Index>(labels.size()) != m) throw InputError("label count mismatch");
  if (m == 0) throw InputError("softmax loss over an empty batch");
  Eigen::MatrixXd scores = (features * weights).rowwise() + bias.transpose();
  double loss = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double top = scores.row(i).maxCoeff();
    scores.row(i).array() = (scores.row(i).array() - top).exp();
    const double total = scores.row(i).sum();
    scores.row(i) /= total;  // now probabilities
    loss -= std::log(scores(i, labels[i]));
  }
  loss /= static_cast<double>(m);
  loss += 0.5 * l2 * weights.squaredNorm();
  if (grad_weights || grad_bias) {
    for (Eigen::Index i = 0; i < m; ++i) scores(i, labels[i]) -= 1.0;
    scores /= static_cast<double>(m);
    if (grad_weights) *grad_weights = features.transpose() * scores + l2 * weights;
    if (grad_bias) *grad_bias = scores.colwise().sum().transpose();
  }
  return loss;
}

ClassificationResult TrainSoftmax(const FeatureMatrix& z, std::span<const int> labels,
                                  const Split& split, const TrainingHyper& hyper) {
  if (static_cast<Eigen::Index>(labels.size()) != z.rows()) {
    throw InputError("need one label per embedding row");
  }
  if (!z.allFinite()) throw InputError("embedding contains non-finite values");
  if (split.train.empty()) throw InputError("empty training split");
  int classes = 0;
  for (auto* part : {&split.train, &split.val, &split.test}) {
    for (auto v : *part) {
      if (labels[v] < 0) throw InputError("split contains an unlabelled node");
      classes = std::max(classes, labels[v] + 1);
    }
  }

  ClassificationResult result;
  std::vector<int> train_labels;
  std::vector<std::int64_t> seen(static_cast<std::size_t>(classes), 0);
  for (auto v : split.train) {
    train_labels.push_back(labels[v]);
    ++seen[labels[v]];
  }
  for (int c = 0; c < classes; ++c) {
    if (!seen[c]) {
      result.warnings.push_back("class " + std::to_string(c) + " has no training examples");
    }
  }

  const Eigen::MatrixXd raw = Gather(z, split.train);
  LinearModel& model = result.model;
  FitStandardizer(raw, hyper.standardize, model.center, model.scale);
  const Eigen::MatrixXd x = Standardize(raw, model.center, model.scale);
  model.weights = Eigen::MatrixXd::Zero(z.cols(), classes);
  model.bias = Eigen::VectorXd::Zero(classes);

  Eigen::MatrixXd gw;
  Eigen::VectorXd gb;
  model.loss_history.reserve(static_cast<std::size_t>(hyper.iterations) + 1);
  for (int it = 0; it < hyper.iterations; ++it) {
    model.loss_history.push_back(
        SoftmaxLoss(x, train_labels, model.weights, model.bias, hyper.l2, &gw, &gb));
    model.weights -= hyper.step * gw;
    model.bias -= hyper.step * gb;
  }
  model.loss_history.push_back(
      SoftmaxLoss(x, train_labels, model.weights, model.bias, hyper.l2));

  result.test_accuracy = Accuracy(model, z, labels, split.test);
  result.val_accuracy = Accuracy(model, z, labels, split.val);
  return result;
}

// ---------------------------------------------------------------------------
// Link prediction

EdgeSplit SplitEdges(const Graph& g, const SplitRatios& ratios, std::uint64_t seed) {
  const std::vector<Edge> edges = g.Edges();
  const auto m = static_cast<std::int64_t>(edges.size());
  if (m < 10) throw ConfigError("link prediction needs at least 10 edges");

  std::vector<std::int64_t> ids(edges.size());
  std::iota(ids.begin(), ids.end(), 0);
  const Split parts = SplitIds(ids, ratios, seed);

  EdgeSplit out;
  out.seed = seed;
  for (auto i : parts.train) out.train.push_back(edges[i]);
  for (auto i : parts.val) out.val.push_back(edges[i]);
  for (auto i : parts.test) out.test.push_back(edges[i]);
  out.train_graph = Graph::FromEdges(g.num_nodes(), out.train);

  const auto n = g.num_nodes();
  const std::int64_t pairs = n * (n - 1) / 2;
  const std::int64_t non_edges = pairs - m;
  if (m > non_edges) {
    throw ConfigError("graph too dense to sample " + std::to_string(m) + " negative pairs");
  }

  RngStream rng(seed, 1);
  std::vector<Edge> negatives;
  negatives.reserve(static_cast<std::size_t>(m));
  if (non_edges < 4 * m) {
    std::vector<Edge> pool;
    pool.reserve(static_cast<std::size_t>(non_edges));
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!g.HasEdge(u, v)) pool.emplace_back(u, v);
      }
    }
    for (std::int64_t i = 0; i < m; ++i) {
      const auto j = i + static_cast<std::int64_t>(
                             rng.UniformInt(static_cast<std::uint64_t>(non_edges - i)));
      std::swap(pool[i], pool[j]);
      negatives.push_back(pool[i]);
    }
  } else {
    std::unordered_set<std::uint64_t> taken;
    while (static_cast<std::int64_t>(negatives.size()) < m) {
      NodeId u = static_cast<NodeId>(rng.UniformInt(static_cast<std::uint64_t>(n)));
      NodeId v = static_cast<NodeId>(rng.UniformInt(static_cast<std::uint64_t>(n)));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (g.HasEdge(u, v)) continue;
      if (!taken.insert(static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
                        static_cast<std::uint64_t>(v))
               .second) {
        continue;
      }
      negatives.emplace_back(u, v);
    }
  }
  auto it = negatives.begin();
  out.train_neg.assign(it, it + static_cast<std::ptrdiff_t>(out.train.size()));
  it += static_cast<std::ptrdiff_t>(out.train.size());
  out.val_neg.assign(it, it + static_cast<std::ptrdiff_t>(out.val.size()));
  it += static_cast<std::ptrdiff_t>(out.val.size());
  out.test_neg.assign(it, negatives.end());
  return out;
}

Eigen::MatrixXd HadamardFeatures(const FeatureMatrix& z, std::span<const Edge> edges) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(edges.size()), z.cols());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (u < 0 || v < 0 || u >= z.rows() || v >= z.rows()) {
      throw InputError("edge endpoint outside embedding rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = z.row(u).cwiseProduct(z.row(v));
  }
  return out;
}

double Auc(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) {
    throw InputError("AUC is undefined without both positive and negative examples");
  }
  // Rank-sum with average ranks for ties.
  std::vector<std::pair<double, bool>> all;
  all.reserve(positive.size() + negative.size());
  for (double s : positive) all.emplace_back(s, true);
  for (double s : negative) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double pos_rank_sum = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (all[t].second) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const auto np = static_cast<double>(positive.size());
  const auto nn = static_cast<double>(negative.size());
  return (pos_rank_sum - np * (np + 1) / 2.0) / (np * nn);
}

namespace {

double Softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double Sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::vector<double> ScoreEdges(const FeatureMatrix& z, std::span<const Edge> edges,
                               const Eigen::VectorXd& w) {
  const Eigen::VectorXd s = HadamardFeatures(z, edges) * w;
  return {s.data(), s.data() + s.size()};
}

}  // namespace

LinkResult LinkPredict(const FeatureMatrix& z, const EdgeSplit& split,
                       const TrainingHyper& hyper) {
  if (split.train.empty() || split.train.size() != split.train_neg.size()) {
    throw InputError("training edges must pair one-to-one with negatives");
  }
  if (!z.allFinite()) throw InputError("embedding contains non-finite values");
  const Eigen::MatrixXd pos = HadamardFeatures(z, split.train);
  const Eigen::MatrixXd neg = HadamardFeatures(z, split.train_neg);

  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  Eigen::MatrixXd stacked(pos.rows() + neg.rows(), pos.cols());
  stacked << pos, neg;
  FitStandardizer(stacked, hyper.standardize, center, scale);
  // Centering cancels in the pairwise differences.
  const Eigen::MatrixXd diff = (pos - neg).array().rowwise() / scale.array();
  const double m = static_cast<double>(diff.rows());

  LinkResult result;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(z.cols());
  auto loss_at = [&](const Eigen::VectorXd& weights, Eigen::VectorXd* grad) {
    const Eigen::VectorXd margin = diff * weights;
    double loss = 0;
    Eigen::VectorXd coef(margin.size());
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      loss += Softplus(-margin[i]);
      coef[i] = -Sigmoid(-margin[i]) / m;
    }
    if (grad) *grad = diff.transpose() * coef + hyper.l2 * weights;
    return loss / m + 0.5 * hyper.l2 * weights.squaredNorm();
  };
  Eigen::VectorXd grad;
  for (int it = 0; it < hyper.iterations; ++it) {
    result.loss_history.push_back(loss_at(w, &grad));
    w -= hyper.step * grad;
  }
  result.loss_history.push_back(loss_at(w, nullptr));

  // Scores on raw Hadamard features; dividing by `scale` folds the
  // standardization into the weights.
  result.weights = w.array() / scale.transpose().array();
  if (!split.test.empty()) {
    result.test_auc = Auc(ScoreEdges(z, split.test, result.weights),
                          ScoreEdges(z, split.test_neg, result.weights));
  }
  if (!split.val.empty()) {
    result.val_auc = Auc(ScoreEdges(z, split.val, result.weights),
                         ScoreEdges(z, split.val_neg, result.weights));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthetic graphs

namespace {

std::int64_t GeometricSkip(double p, RngStream& rng) {
  if (p >= 1.0) return 0;
  const double u = rng.Uniform();
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

// Pairs (lo + w, lo + v) with 0 <= w < v < size, each kept with prob. p.
void SampleTriangle(NodeId lo, std::int64_t size, double p, RngStream& rng,
                    std::vector<Edge>& out) {
  if (p <= 0 || size < 2) return;
  std::int64_t v = 1;
  std::int64_t w = -1;
  while (v < size) {
    w += 1 + GeometricSkip(p, rng);
    while (w >= v && v < size) {
      w -= v;
      ++v;
    }
    if (v < size) out.emplace_back(lo + w, lo + v);
  }
}

// Pairs (a_lo + i, b_lo + j) with i < a_size, j < b_size, kept with prob. p.
void SampleRectangle(NodeId a_lo, std::int64_t a_size, NodeId b_lo, std::int64_t b_size,
                     double p, RngStream& rng, std::vector<Edge>& out) {
  if (p <= 0 || a_size == 0 || b_size == 0) return;
  const std::int64_t total = a_size * b_size;
  for (std::int64_t idx = GeometricSkip(p, rng); idx < total;
       idx += 1 + GeometricSkip(p, rng)) {
    out.emplace_back(a_lo + idx / b_size, b_lo + idx % b_size);
  }
}

void CheckProbability(double p, const char* name) {
  if (!(p >= 0 && p <= 1)) throw InputError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

Graph ErdosRenyi(NodeId n, double p, std::uint64_t seed) {
  if (n < 0) throw InputError("negative node count");
  CheckProbability(p, "edge probability");
  RngStream rng(seed, 0);
  std::vector<Edge> edges;
  SampleTriangle(0, n, p, rng, edges);
  return Graph::FromEdges(n, edges);
}

SbmDataset GenerateSbm(const SbmConfig& config, std::uint64_t seed) {
  if (config.n < 1 || config.classes < 1 || config.d < 1) {
    throw InputError("SBM needs n, classes and d to be positive");
  }
  if (config.classes > config.n) throw InputError("more classes than nodes");
  CheckProbability(config.p_in, "p_in");
  CheckProbability(config.p_out, "p_out");
  if (!(config.p_in > config.p_out)) throw InputError("SBM requires p_in > p_out");
  if (!(config.feature_shift > 0 && config.feature_shift <= 1)) {
    throw InputError("feature_shift must lie in (0, 1]");
  }
  const double noise = config.noise < 0 ? 1.0 - config.feature_shift : config.noise;

  const auto n = config.n;
  const int classes = config.classes;
  std::vector<NodeId> start(static_cast<std::size_t>(classes) + 1);
  for (int c = 0; c <= classes; ++c) start[c] = c * n / classes;

  SbmDataset data;
  data.labels.resize(static_cast<std::size_t>(n));
  for (int c = 0; c < classes; ++c) {
    std::fill(data.labels.begin() + start[c], data.labels.begin() + start[c + 1], c);
  }

  RngStream rng(seed, 0);
  std::vector<Edge> edges;
  for (int a = 0; a < classes; ++a) {
    SampleTriangle(start[a], start[a + 1] - start[a], config.p_in, rng, edges);
    for (int b = a + 1; b < classes; ++b) {
      SampleRectangle(start[a], start[a + 1] - start[a], start[b], start[b + 1] - start[b],
                      config.p_out, rng, edges);
    }
  }
  data.graph = Graph::FromEdges(n, edges);

  data.features.resize(n, config.d);
  const std::uint64_t feature_seed = DeriveSeed(seed, 1);
  for (NodeId v = 0; v < n; ++v) {
    RngStream frng(feature_seed, static_cast<std::uint64_t>(v));
    const int c = data.labels[v];
    for (int j = 0; j < config.d; ++j) {
      const double mean = j % classes == c ? config.feature_shift : -config.feature_shift;
      const double jitter = noise > 0 ? frng.Uniform(-noise, noise) : 0.0;
      data.features(v, j) = std::clamp(mean + jitter, -1.0, 1.0);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Pipelines

double RunNodeClassification(const Graph& g, const FeatureMatrix& features,
                             std::span<const int> labels, const MechanismSpec& spec,
                             const PipelineOptions& options, std::uint64_t run_seed) {
  if (features.rows() != g.num_nodes() ||
      static_cast<NodeId>(labels.size()) != g.num_nodes()) {
    throw InputError("graph, features and labels disagree on the node count");
  }
  std::vector<std::int64_t> labelled;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] >= 0) labelled.push_back(static_cast<std::int64_t>(v));
  }
  const Split split = SplitIds(labelled, options.node_ratios, DeriveSeed(run_seed, 1));
  const FeatureMatrix noisy =
      PerturbRows(features, spec, DeriveSeed(run_seed, 2), options.threads);
  const FeatureMatrix z = BackwardPush(g, noisy, options.propagation, options.threads);
  return TrainSoftmax(z, labels, split, options.hyper).test_accuracy;
}

double RunLinkPrediction(const Graph& g, const FeatureMatrix& features,
                         const MechanismSpec& spec, const PipelineOptions& options,
                         std::uint64_t run_seed) {
  if (features.rows() != g.num_nodes()) {
    throw InputError("graph and features disagree on the node count");
  }
  const EdgeSplit split = SplitEdges(g, options.edge_ratios, DeriveSeed(run_seed, 1));
  const FeatureMatrix noisy =
      PerturbRows(features, spec, DeriveSeed(run_seed, 2), options.threads);
  const FeatureMatrix z =
      BackwardPush(split.train_graph, noisy, options.propagation, options.threads);
  return LinkPredict(z, split, options.hyper).test_auc;
}

}  // namespace ldpembed
