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
#ifndef LDPEMBED_FEATURES_HPP_
#define LDPEMBED_FEATURES_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldpembed/errors.hpp"

namespace ldpembed {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// One row per user, one column per feature dimension. Covers the raw
// features, their perturbed reports and the propagated embeddings.
using FeatureMatrix = Matrix<double>;

struct FeatureBounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// Column-wise min/max of `x`.
template <typename Derived>
FeatureBounds ComputeBounds(const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() == 0) throw InputError("cannot compute bounds of an empty matrix");
  return {x.colwise().minCoeff().transpose().template cast<double>(),
          x.colwise().maxCoeff().transpose().template cast<double>()};
}

// Affine map of each column onto [-1, 1] using `bounds`, clamped.
// Degenerate columns (lo == hi) map to 0.
template <typename Derived>
Matrix<typename Derived::Scalar> Normalize(const Eigen::MatrixBase<Derived>& x,
                                           const FeatureBounds& bounds) {
  using Scalar = typename Derived::Scalar;
  const auto d = x.cols();
  if (bounds.lo.size() != d || bounds.hi.size() != d) {
    throw InputError("bounds dimension does not match feature dimension");
  }
  if (!bounds.lo.allFinite() || !bounds.hi.allFinite()) {
    throw InputError("feature bounds must be finite");
  }
  if (!x.allFinite()) throw InputError("feature matrix contains non-finite values");
  Matrix<Scalar> out(x.rows(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = bounds.lo[j];
    const double hi = bounds.hi[j];
    if (lo > hi) throw InputError("bounds lo > hi in column " + std::to_string(j));
    if (hi == lo) {
      out.col(j).setZero();
      continue;
    }
    const Scalar scale = Scalar(2.0 / (hi - lo));
    out.col(j) = ((x.col(j).array() - Scalar(lo)) * scale - Scalar(1))
                     .cwiseMax(Scalar(-1))
                     .cwiseMin(Scalar(1));
  }
  return out;
}

// CSV: comma-separated decimal floats, one row per user.
FeatureMatrix ParseCsvMatrix(const std::string& text,
                             const std::string& source = "<text>");
std::string FormatCsvMatrix(const FeatureMatrix& x);

// Binary: "PGE1", u64 n, u64 d (little endian), then n*d little-endian
// doubles in row-major order.
FeatureMatrix ParseBinaryMatrix(const std::string& bytes,
                                const std::string& source = "<bytes>");
std::string FormatBinaryMatrix(const FeatureMatrix& x);

// Dispatches on the leading magic bytes.
FeatureMatrix LoadFeatures(const std::string& path);
void SaveFeaturesCsv(const FeatureMatrix& x, const std::string& path);
void SaveFeaturesBinary(const FeatureMatrix& x, const std::string& path);

// Two CSV rows: per-dimension lo, then hi.
FeatureBounds LoadBounds(const std::string& path);
void SaveBounds(const FeatureBounds& b, const std::string& path);

// One integer class per line; -1 marks an unlabelled node and `#` starts a
// comment line.
std::vector<int> LoadLabels(const std::string& path);
void SaveLabels(const std::vector<int>& labels, const std::string& path);

// Keeps the `top` most frequent classes, relabelled densely by decreasing
// frequency (ties by class id); other nodes get label -1. Returns the ids of
// retained nodes.
std::vector<std::int64_t> RestrictToTopClasses(std::vector<int>& labels, int top);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

}  // namespace ldpembed

#endif  // LDPEMBED_FEATURES_HPP_
