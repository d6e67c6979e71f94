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
#ifndef LDPEMBED_ANALYSIS_HPP_
#define LDPEMBED_ANALYSIS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldpembed/features.hpp"
#include "ldpembed/graph.hpp"
#include "ldpembed/mechanisms.hpp"
#include "ldpembed/propagation.hpp"

namespace ldpembed {

// Monte-Carlo estimate of the report distribution in dimension 0 when every
// input coordinate equals x.
struct MomentEstimate {
  double mean;
  double variance;   // unbiased sample variance
  double mean_stderr;
  std::int64_t samples;
};

MomentEstimate EstimateMoments(const MechanismSpec& spec, double x, Eigen::Index d,
                               std::int64_t samples, std::uint64_t seed);

struct PrivacyCheckOptions {
  int x_grid = 201;
  int c_grid = 401;
  // Test hook: multiplies the out-of-band density q. Anything other than 1
  // yields an invalid mechanism that the check must reject.
  double q_scale = 1.0;
};

struct PrivacyCheckResult {
  double epsilon;
  double max_ratio;          // max over (x, x', c) of pdf(x, c) / pdf(x', c)
  double bound;              // e^epsilon (1 + 1e-12)
  double normalization_error;  // max over x of |integral of pdf - 1|
  bool passed;
};

// Evaluates the square wave density on an x_grid x x_grid x c_grid grid of
// input pairs and outputs over [-1, 1]^2 x [-b-1, 1+b].
PrivacyCheckResult PrivacyRatioCheck(double epsilon, const PrivacyCheckOptions& options = {});

// Worst-case one-dimensional variance per (epsilon, kind).
struct VarianceCurve {
  std::vector<MechanismKind> kinds;
  std::vector<double> epsilons;
  Eigen::MatrixXd values;  // epsilons x kinds

  double At(MechanismKind kind, std::size_t eps_index) const;
  // Square wave (kHds column) strictly below `other` at the given epsilon.
  bool SquareWaveBelow(MechanismKind other, std::size_t eps_index) const;
};

VarianceCurve ComputeVarianceCurve(const std::vector<MechanismKind>& kinds,
                                   const std::vector<double>& epsilons);
// Columns: epsilon, one per kind, then sw_lt_<kind> flags for every other
// kind when the square wave is present.
std::string FormatVarianceCurveCsv(const VarianceCurve& curve);

enum class PropagationMethod { kDense, kPush };

struct ErrorTrialReport {
  MechanismSpec spec;
  Eigen::Index d = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  // Per trial: mean over nodes of max_j |z~(v, j) - z(v, j)|.
  std::vector<double> trial_errors;
  // All trials x nodes per-node errors, trial-major.
  std::vector<double> node_errors;
  double mean_error = 0;
  double quantile_90 = 0;  // delta = 0.1
  double quantile_95 = 0;  // delta = 0.05
};

// Perturbs x with `spec` once per trial and compares the propagated
// reports to the propagated clean features. HDS reports are compared
// without debiasing. kDense propagates with a precomputed n x n matrix
// (series truncated at 1e-12); kPush runs backward push on both.
ErrorTrialReport ErrorExperiment(const Graph& g, const FeatureMatrix& x,
                                 const MechanismSpec& spec,
                                 const PropagationParams<double>& params, int trials,
                                 std::uint64_t seed,
                                 PropagationMethod method = PropagationMethod::kDense);

// Same, with the propagation matrix supplied by the caller.
ErrorTrialReport ErrorExperiment(const Matrix<double>& propagation, const FeatureMatrix& x,
                                 const MechanismSpec& spec, int trials, std::uint64_t seed);

// Nearest-rank empirical quantile.
double EmpiricalQuantile(std::vector<double> values, double level);

std::string FormatErrorReport(const ErrorTrialReport& report);
// Columns: mechanism,epsilon,d,k,trial,error. `header` controls the first line.
std::string FormatErrorCsv(const ErrorTrialReport& report, bool header = true);

}  // namespace ldpembed

#endif  // LDPEMBED_ANALYSIS_HPP_
