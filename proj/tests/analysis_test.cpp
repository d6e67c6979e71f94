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
#include "ldpembed/analysis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ldpembed/errors.hpp"
#include "ldpembed/eval.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {
namespace {

constexpr std::int64_t kSamples = 200000;

FeatureMatrix RandomUnit(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  FeatureMatrix x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform(-1, 1);
  return x;
}

TEST(EstimateMomentsTest, HdsSymmetricAtZero) {
  const MomentEstimate m = EstimateMoments({MechanismKind::kHds, 1.0, 1}, 0.0, 1, kSamples, 1);
  EXPECT_NEAR(m.mean, 0.0, 4 * m.mean_stderr);
  EXPECT_EQ(m.samples, kSamples);
}

TEST(EstimateMomentsTest, LaplaceVariance) {
  const MomentEstimate m =
      EstimateMoments({MechanismKind::kLaplace, 1.0, 1}, 0.0, 1, kSamples, 2);
  EXPECT_NEAR(m.variance, 8.0, 0.05 * 8.0);
}

TEST(EstimateMomentsTest, MultiBitVariance) {
  const MomentEstimate m =
      EstimateMoments({MechanismKind::kMultiBit, 1.0, 1}, 0.0, 1, kSamples, 3);
  EXPECT_NEAR(m.variance, 4.6821, 0.05 * 4.6821);
}

TEST(EstimateMomentsTest, Reproducible) {
  const MechanismSpec spec{MechanismKind::kPiecewise, 2.0, 1};
  const MomentEstimate a = EstimateMoments(spec, 0.3, 2, 5000, 9);
  const MomentEstimate b = EstimateMoments(spec, 0.3, 2, 5000, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(EstimateMomentsPropertyTest, AgreesWithClosedFormsOnRandomConfigs) {
  RngStream rng(2024, 0);
  for (int i = 0; i < 5; ++i) {
    const double x = rng.Uniform(-1, 1);
    const double eps = rng.Uniform(0.3, 5.0);
    const int d = 1 + static_cast<int>(rng.UniformInt(8));
    const int k = 1 + static_cast<int>(rng.UniformInt(d));
    for (auto kind : {MechanismKind::kHds, MechanismKind::kPiecewise,
                      MechanismKind::kMultiBit, MechanismKind::kLaplace}) {
      const MechanismSpec spec{kind, eps, k};
      const Moments expected = ClosedFormMoments(spec, x, d);
      const MomentEstimate m = EstimateMoments(spec, x, d, kSamples, 100 + i);
      EXPECT_NEAR(m.mean, expected.mean, 4 * m.mean_stderr)
          << ToString(kind) << " x=" << x << " eps=" << eps << " k=" << k << " d=" << d;
      EXPECT_NEAR(m.variance, expected.variance, 0.05 * expected.variance)
          << ToString(kind) << " x=" << x << " eps=" << eps << " k=" << k << " d=" << d;
    }
  }
}

TEST(PrivacyCheckTest, UnitBudgetAttainsE) {
  const PrivacyCheckResult r = PrivacyRatioCheck(1.0);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.max_ratio, std::exp(1.0), 1e-12);
  EXPECT_LT(r.normalization_error, 1e-12);
}

TEST(PrivacyCheckTest, SmallBudget) {
  const PrivacyCheckResult r = PrivacyRatioCheck(0.01);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.max_ratio, 1.01005, 5e-6);
  EXPECT_LE(r.max_ratio, std::exp(0.01) * (1 + 1e-12));
}

TEST(PrivacyCheckTest, IdenticalInputsGiveUnitRatio) {
  const auto sw = SquareWaveConstants::ForBudget(2.0);
  for (double x : {-1.0, 0.0, 0.37}) {
    for (double c = -sw.b - 1; c <= 1 + sw.b; c += 0.01) {
      EXPECT_EQ(SquareWavePdf(x, c, sw) / SquareWavePdf(x, c, sw), 1.0);
    }
  }
}

TEST(PrivacyCheckPropertyTest, BoundHoldsAcrossBudgets) {
  for (double eps : {0.01, 0.1, 1.0, 2.0, 5.0}) {
    const PrivacyCheckResult r = PrivacyRatioCheck(eps);
    EXPECT_TRUE(r.passed) << eps;
    EXPECT_LE(r.max_ratio, std::exp(eps) * (1 + 1e-12)) << eps;
  }
}

TEST(PrivacyCheckTest, DetectsScaledOutOfBandDensity) {
  PrivacyCheckOptions options;
  options.q_scale = 1.1;
  for (double eps : {0.01, 1.0, 5.0}) EXPECT_FALSE(PrivacyRatioCheck(eps, options).passed);
  options.q_scale = 0.9;
  EXPECT_FALSE(PrivacyRatioCheck(1.0, options).passed);
}

TEST(VarianceCurveTest, LaplaceColumnExact) {
  const std::vector<double> eps{0.5, 1, 2, 3, 4, 5};
  const VarianceCurve curve =
      ComputeVarianceCurve({MechanismKind::kHds, MechanismKind::kLaplace}, eps);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_EQ(curve.At(MechanismKind::kLaplace, i), 8.0 / (eps[i] * eps[i]));
  }
}

TEST(VarianceCurveTest, OrderingFlags) {
  const std::vector<double> eps{0.5, 1, 2, 3, 4, 5};
  const VarianceCurve curve = ComputeVarianceCurve(
      {MechanismKind::kHds, MechanismKind::kPiecewise, MechanismKind::kLaplace,
       MechanismKind::kMultiBit},
      eps);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(curve.SquareWaveBelow(MechanismKind::kPiecewise, i));
  EXPECT_FALSE(curve.SquareWaveBelow(MechanismKind::kPiecewise, 5));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_TRUE(curve.SquareWaveBelow(MechanismKind::kLaplace, i));
    EXPECT_TRUE(curve.SquareWaveBelow(MechanismKind::kMultiBit, i));
  }
  const std::string csv = FormatVarianceCurveCsv(curve);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epsilon,sw,piecewise,laplace,multibit,sw_lt_piecewise,sw_lt_laplace,"
            "sw_lt_multibit");
  EXPECT_NE(csv.find("\n1,1.14609909235"), std::string::npos);
}

TEST(ErrorExperimentTest, IdentityHasZeroError) {
  const Graph g = ErdosRenyi(60, 0.1, 1);
  const FeatureMatrix x = RandomUnit(60, 8, 1);
  const auto report = ErrorExperiment(g, x, {MechanismKind::kIdentity, 1.0, 1},
                                      PropagationParams<double>{}, 10, 5);
  EXPECT_EQ(report.mean_error, 0.0);
  EXPECT_EQ(report.quantile_95, 0.0);
  EXPECT_EQ(report.trial_errors.size(), 10u);
  EXPECT_EQ(report.node_errors.size(), 600u);
  const auto push = ErrorExperiment(g, x, {MechanismKind::kIdentity, 1.0, 1},
                                    PropagationParams<double>{}, 10, 5,
                                    PropagationMethod::kPush);
  EXPECT_EQ(push.mean_error, 0.0);
}

TEST(ErrorExperimentTest, FirstTrialMatchesManualComputation) {
  const Graph g = ErdosRenyi(50, 0.1, 2);
  const FeatureMatrix x = RandomUnit(50, 6, 2);
  const MechanismSpec spec{MechanismKind::kHds, 1.0, 2};
  const Matrix<double> pi = DensePropagationMatrix<double>(g, 0.1, 0.5, 300);
  const auto report = ErrorExperiment(pi, x, spec, 10, 77);
  const FeatureMatrix diff = pi * (PerturbRows(x, spec, DeriveSeed(77, 0)) - x);
  double sum = 0;
  for (Eigen::Index v = 0; v < 50; ++v) sum += diff.row(v).cwiseAbs().maxCoeff();
  EXPECT_NEAR(report.trial_errors[0], sum / 50, 1e-12);
}

TEST(ErrorExperimentTest, DenseAndPushAgree) {
  const Graph g = ErdosRenyi(80, 0.08, 3);
  const FeatureMatrix x = RandomUnit(80, 6, 3);
  const PropagationParams<double> params{0.2, 0.5, 1e-9};
  const MechanismSpec spec{MechanismKind::kPiecewise, 1.0, 1};
  const auto dense = ErrorExperiment(g, x, spec, params, 10, 4, PropagationMethod::kDense);
  const auto push = ErrorExperiment(g, x, spec, params, 10, 4, PropagationMethod::kPush);
  EXPECT_NEAR(dense.mean_error, push.mean_error, 1e-5 * dense.mean_error);
}

TEST(ErrorExperimentTest, ReproducibleReports) {
  const Graph g = ErdosRenyi(40, 0.1, 4);
  const FeatureMatrix x = RandomUnit(40, 5, 4);
  const MechanismSpec spec{MechanismKind::kLaplace, 2.0, 1};
  const auto a = ErrorExperiment(g, x, spec, PropagationParams<double>{}, 10, 8);
  const auto b = ErrorExperiment(g, x, spec, PropagationParams<double>{}, 10, 8);
  EXPECT_EQ(FormatErrorReport(a), FormatErrorReport(b));
  EXPECT_EQ(FormatErrorCsv(a), FormatErrorCsv(b));
  EXPECT_EQ(a.node_errors, b.node_errors);
}

TEST(ErrorExperimentTest, HdsBelowBaselinesSmallScale) {
  const Graph g = ErdosRenyi(200, 0.03, 5);
  const FeatureMatrix x = RandomUnit(200, 128, 5);
  const Matrix<double> pi = DensePropagationMatrix<double>(g, 0.1, 0.5, 300);
  const int k = 2;
  const double hds = ErrorExperiment(pi, x, {MechanismKind::kHds, 1.0, k}, 10, 6).mean_error;
  for (auto kind : {MechanismKind::kLaplace, MechanismKind::kPiecewise,
                    MechanismKind::kMultiBit}) {
    EXPECT_LT(hds, ErrorExperiment(pi, x, {kind, 1.0, k}, 10, 6).mean_error) << ToString(kind);
  }
}

TEST(ErrorExperimentTest, QuantilesOrdered) {
  const Graph g = ErdosRenyi(60, 0.1, 6);
  const FeatureMatrix x = RandomUnit(60, 4, 6);
  const auto r = ErrorExperiment(g, x, {MechanismKind::kMultiBit, 1.0, 1},
                                 PropagationParams<double>{}, 10, 9);
  EXPECT_LE(r.quantile_90, r.quantile_95);
  EXPECT_GT(r.quantile_90, 0.0);
}

TEST(ErrorExperimentTest, Formats) {
  const Graph g = ErdosRenyi(20, 0.2, 7);
  const FeatureMatrix x = RandomUnit(20, 3, 7);
  const auto r = ErrorExperiment(g, x, {MechanismKind::kHds, 1.0, 1},
                                 PropagationParams<double>{}, 10, 1);
  const std::string csv = FormatErrorCsv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mechanism,epsilon,d,k,trial,error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_EQ(FormatErrorCsv(r, false).find("mechanism"), std::string::npos);
  const std::string text = FormatErrorReport(r);
  EXPECT_NE(text.find("mechanism=hds\n"), std::string::npos);
  EXPECT_NE(text.find("private=true\n"), std::string::npos);
  EXPECT_NE(text.find("seed=1\n"), std::string::npos);
}

TEST(QuantileTest, NearestRank) {
  EXPECT_EQ(EmpiricalQuantile({5, 1, 4, 2, 3}, 0.9), 5);
  EXPECT_EQ(EmpiricalQuantile({5, 1, 4, 2, 3}, 0.5), 3);
  EXPECT_EQ(EmpiricalQuantile({5, 1, 4, 2, 3}, 0.2), 1);
  EXPECT_EQ(EmpiricalQuantile({7}, 1.0), 7);
  EXPECT_THROW(EmpiricalQuantile({}, 0.5), InputError);
  EXPECT_THROW(EmpiricalQuantile({1}, 0.0), InputError);
}

}  // namespace
}  // namespace ldpembed
