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
#ifndef LDPEMBED_PROPAGATION_HPP_
#define LDPEMBED_PROPAGATION_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ldpembed/errors.hpp"
#include "ldpembed/features.hpp"
#include "ldpembed/graph.hpp"
#include "ldpembed/parallel.hpp"

namespace ldpembed {

// Personalized PageRank propagation
//
//   Z = sum_{l >= 0} alpha (1 - alpha)^l (D^{r-1} A D^{-r})^l X
//
// computed either by backward push (BackwardPush) or by evaluating the
// truncated series densely (DensePprOracle). Degree scaling uses
// max(deg, 1), so an isolated node's row is alpha times its input row.
template <typename Scalar = double>
struct PropagationParams {
  Scalar alpha = Scalar(0.1);  // decay factor, in (0, 1)
  Scalar r = Scalar(0.5);      // convolution coefficient, in [0, 1]
  Scalar r_max = Scalar(1e-4); // absolute residue threshold, > 0

  void Validate() const {
    if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must lie in (0, 1)");
    if (!(r >= 0 && r <= 1)) throw InputError("r must lie in [0, 1]");
    if (!(r_max > 0)) throw InputError("r_max must be positive");
  }
};

// Reserve and residue matrices of a finished (or in-progress) push.
template <typename Scalar>
struct PushState {
  Matrix<Scalar> reserve;
  Matrix<Scalar> residue;
  std::int64_t pushes = 0;
};

// Smallest t with (1 - alpha)^t < tolerance.
int SeriesTermsFor(double alpha, double tolerance);

// max(deg(v), 1)^power for every node.
template <typename Scalar>
Vector<Scalar> DegreePower(const Graph& g, Scalar power) {
  Vector<Scalar> out(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto deg = std::max<std::int64_t>(g.degree(v), 1);
    out[v] = power == Scalar(0) ? Scalar(1) : std::pow(Scalar(deg), power);
  }
  return out;
}

namespace internal {

// Runs the push loop on one column in place. `queued` is scratch of size n,
// all-false on entry and exit. Nodes are processed in FIFO order, seeded in
// increasing id order.
template <typename Scalar>
std::int64_t PushColumn(const Graph& g, const Vector<Scalar>& inv_degree, Scalar alpha,
                        Scalar r_max, Scalar* residue, Scalar* reserve,
                        std::vector<NodeId>& queue, std::vector<char>& queued) {
  const NodeId n = g.num_nodes();
  const Scalar spread = Scalar(1) - alpha;
  queue.clear();
  for (NodeId v = 0; v < n; ++v) {
    if (std::abs(residue[v]) > r_max) {
      queue.push_back(v);
      queued[v] = 1;
    }
  }
  std::int64_t pushes = 0;
  // Ring buffer over `queue`: every node is queued at most once at a time,
  // so n slots suffice.
  std::size_t head = 0;
  std::size_t size = queue.size();
  queue.resize(static_cast<std::size_t>(std::max<NodeId>(n, 1)));
  while (size > 0) {
    const NodeId v = queue[head];
    head = (head + 1) % queue.size();
    --size;
    queued[v] = 0;
    const Scalar rv = residue[v];
    if (!(std::abs(rv) > r_max)) continue;
    residue[v] = Scalar(0);
    reserve[v] += alpha * rv;
    ++pushes;
    const Scalar out = spread * rv;
    for (NodeId u : g.neighbors(v)) {
      residue[u] += out * inv_degree[u];
      if (!queued[u] && std::abs(residue[u]) > r_max) {
        queue[(head + size) % queue.size()] = u;
        ++size;
        queued[u] = 1;
      }
    }
  }
  return pushes;
}

}  // namespace internal

// Runs backward push on every column of `x`, returning the final reserve
// and residue matrices. Columns are independent and are split across
// `threads` workers in contiguous blocks; the result does not depend on the
// thread count. At return every |residue(v, j)| <= r_max.
template <typename Derived, typename Scalar = typename Derived::Scalar>
PushState<Scalar> RunBackwardPush(const Graph& g, const Eigen::MatrixBase<Derived>& x,
                                  const PropagationParams<Scalar>& params,
                                  int threads = 0) {
  params.Validate();
  if (x.rows() != g.num_nodes()) {
    throw InputError("feature matrix has " + std::to_string(x.rows()) +
                     " rows but graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
  const Vector<Scalar> inv_degree = DegreePower<Scalar>(g, Scalar(-1));
  const Vector<Scalar> pre = DegreePower<Scalar>(g, -params.r);

  PushState<Scalar> state;
  state.residue = pre.asDiagonal() * x.template cast<Scalar>();
  state.reserve = Matrix<Scalar>::Zero(x.rows(), x.cols());

  std::vector<std::int64_t> pushes(static_cast<std::size_t>(x.cols()), 0);
  ParallelChunks(x.cols(), threads, [&](std::int64_t begin, std::int64_t end) {
    std::vector<NodeId> queue;
    std::vector<char> queued(static_cast<std::size_t>(g.num_nodes()), 0);
    for (std::int64_t j = begin; j < end; ++j) {
      pushes[j] = internal::PushColumn<Scalar>(g, inv_degree, params.alpha, params.r_max,
                                               state.residue.col(j).data(),
                                               state.reserve.col(j).data(), queue, queued);
    }
  });
  for (auto p : pushes) state.pushes += p;
  return state;
}

// Z = D^r Q where Q is the reserve after backward push.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Matrix<Scalar> BackwardPush(const Graph& g, const Eigen::MatrixBase<Derived>& x,
                            const PropagationParams<Scalar>& params, int threads = 0,
                            std::int64_t* pushes = nullptr) {
  PushState<Scalar> state = RunBackwardPush(g, x, params, threads);
  if (pushes) *pushes = state.pushes;
  return DegreePower<Scalar>(g, params.r).asDiagonal() * state.reserve;
}

// Sparse operator D^{r-1} A D^{-r}.
template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> TransitionOperator(const Graph& g, Scalar r) {
  const Vector<Scalar> left = DegreePower<Scalar>(g, r - Scalar(1));
  const Vector<Scalar> right = DegreePower<Scalar>(g, -r);
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(g.flat_neighbors().size());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) triplets.emplace_back(u, v, left[u] * right[v]);
  }
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> t(g.num_nodes(), g.num_nodes());
  t.setFromTriplets(triplets.begin(), triplets.end());
  return t;
}

// Truncated series with `terms` summands (l = 0 .. terms-1).
template <typename Derived, typename Scalar = typename Derived::Scalar>
Matrix<Scalar> DensePprOracle(const Graph& g, const Eigen::MatrixBase<Derived>& x,
                              Scalar alpha, Scalar r, int terms) {
  PropagationParams<Scalar>{alpha, r, Scalar(1)}.Validate();
  if (x.rows() != g.num_nodes()) throw InputError("feature matrix row count mismatch");
  if (terms < 1) throw InputError("series needs at least one term");
  const auto t = TransitionOperator<Scalar>(g, r);
  Matrix<Scalar> power = x.template cast<Scalar>();
  Matrix<Scalar> z = alpha * power;
  Scalar weight = alpha;
  for (int l = 1; l < terms; ++l) {
    power = t * power;
    weight *= Scalar(1) - alpha;
    z.noalias() += weight * power;
  }
  return z;
}

// The dense n x n propagation matrix, i.e. the oracle applied to I.
template <typename Scalar = double>
Matrix<Scalar> DensePropagationMatrix(const Graph& g, Scalar alpha, Scalar r, int terms) {
  return DensePprOracle(g, Matrix<Scalar>::Identity(g.num_nodes(), g.num_nodes()), alpha,
                        r, terms);
}

}  // namespace ldpembed

#endif  // LDPEMBED_PROPAGATION_HPP_
