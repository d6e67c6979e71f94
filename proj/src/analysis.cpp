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

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ldpembed/errors.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {

MomentEstimate EstimateMoments(const MechanismSpec& spec, double x, Eigen::Index d,
                               std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw InputError("need at least two samples");
  const Perturber perturb(spec, d);
  const Eigen::VectorXd input = Eigen::VectorXd::Constant(d, x);
  RngStream rng(seed, 0);
  // Welford
  double mean = 0;
  double m2 = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double v = perturb(input, rng)[0];
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, var, std::sqrt(var / static_cast<double>(samples)), samples};
}

PrivacyCheckResult PrivacyRatioCheck(double epsilon, const PrivacyCheckOptions& options) {
  if (options.x_grid < 2 || options.c_grid < 2) throw InputError("grids need two points");
  auto sw = SquareWaveConstants::ForBudget(epsilon);
  sw.q *= options.q_scale;

  std::vector<double> xs(static_cast<std::size_t>(options.x_grid));
  for (int i = 0; i < options.x_grid; ++i) {
    xs[i] = std::clamp(-1.0 + 2.0 * i / (options.x_grid - 1), -1.0, 1.0);
  }
  const double lo = -sw.b - 1.0;
  const double hi = 1.0 + sw.b;

  double max_ratio = 0.0;
  std::vector<double> dens(xs.size());
  for (int ci = 0; ci < options.c_grid; ++ci) {
    const double c = ci == options.c_grid - 1 ? hi : lo + (hi - lo) * ci / (options.c_grid - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) dens[i] = SquareWavePdf(xs[i], c, sw);
    for (double num : dens) {
      for (double den : dens) max_ratio = std::max(max_ratio, num / den);
    }
  }

  // The band [x-b, x+b] always lies inside the output range, so the mass is
  // the same for every x.
  const double mass = 2.0 * sw.b * sw.p + 2.0 * sw.q;
  const double norm_err = std::abs(mass - 1.0);
  const double bound = std::exp(epsilon) * (1.0 + 1e-12);
  return {epsilon, max_ratio, bound, norm_err, max_ratio <= bound && norm_err < 1e-9};
}

double VarianceCurve::At(MechanismKind kind, std::size_t eps_index) const {
  auto it = std::find(kinds.begin(), kinds.end(), kind);
  if (it == kinds.end()) throw InputError("mechanism not in variance curve");
  return values(static_cast<Eigen::Index>(eps_index), it - kinds.begin());
}

bool VarianceCurve::SquareWaveBelow(MechanismKind other, std::size_t eps_index) const {
  return At(MechanismKind::kHds, eps_index) < At(other, eps_index);
}

VarianceCurve ComputeVarianceCurve(const std::vector<MechanismKind>& kinds,
                                   const std::vector<double>& epsilons) {
  VarianceCurve curve{kinds, epsilons,
                      Eigen::MatrixXd(static_cast<Eigen::Index>(epsilons.size()),
                                      static_cast<Eigen::Index>(kinds.size()))};
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      curve.values(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(k)) =
          WorstCaseVariance(kinds[k], epsilons[e]);
    }
  }
  return curve;
}

std::string FormatVarianceCurveCsv(const VarianceCurve& curve) {
  const bool has_sw = std::find(curve.kinds.begin(), curve.kinds.end(),
                                MechanismKind::kHds) != curve.kinds.end();
  std::string out = "epsilon";
  for (auto k : curve.kinds) out += "," + std::string(k == MechanismKind::kHds ? "sw" : ToString(k));
  if (has_sw) {
    for (auto k : curve.kinds) {
      if (k != MechanismKind::kHds) out += ",sw_lt_" + std::string(ToString(k));
    }
  }
  out += '\n';
  for (std::size_t e = 0; e < curve.epsilons.size(); ++e) {
    out += FormatDouble(curve.epsilons[e]);
    for (std::size_t k = 0; k < curve.kinds.size(); ++k) {
      out += "," + FormatDouble(curve.values(static_cast<Eigen::Index>(e),
                                             static_cast<Eigen::Index>(k)));
    }
    if (has_sw) {
      for (auto k : curve.kinds) {
        if (k != MechanismKind::kHds) out += curve.SquareWaveBelow(k, e) ? ",1" : ",0";
      }
    }
    out += '\n';
  }
  return out;
}

double EmpiricalQuantile(std::vector<double> values, double level) {
  if (values.empty()) throw InputError("quantile of empty sample");
  if (!(level > 0 && level <= 1)) throw InputError("quantile level must lie in (0, 1]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

namespace {

ErrorTrialReport RunTrials(const FeatureMatrix& x, const MechanismSpec& spec, int trials,
                           std::uint64_t seed,
                           const std::function<Matrix<double>(const FeatureMatrix&)>& propagate) {
  if (trials < 1) throw InputError("need at least one trial");
  spec.Validate(x.cols());
  ErrorTrialReport report;
  report.spec = spec;
  report.d = x.cols();
  report.trials = trials;
  report.seed = seed;

  const Matrix<double> clean = propagate(x);
  const auto n = x.rows();
  report.node_errors.reserve(static_cast<std::size_t>(trials * n));
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    const FeatureMatrix noisy = PerturbRows(x, spec, DeriveSeed(seed, static_cast<std::uint64_t>(t)));
    const Matrix<double> diff = propagate(noisy) - clean;
    double trial_sum = 0;
    for (Eigen::Index v = 0; v < n; ++v) {
      const double e = n && diff.cols() ? diff.row(v).cwiseAbs().maxCoeff() : 0.0;
      report.node_errors.push_back(e);
      trial_sum += e;
    }
    report.trial_errors.push_back(n ? trial_sum / static_cast<double>(n) : 0.0);
    total += trial_sum;
  }
  const auto count = static_cast<double>(report.node_errors.size());
  report.mean_error = count ? total / count : 0.0;
  if (!report.node_errors.empty()) {
    report.quantile_90 = EmpiricalQuantile(report.node_errors, 0.90);
    report.quantile_95 = EmpiricalQuantile(report.node_errors, 0.95);
  }
  return report;
}

}  // namespace

ErrorTrialReport ErrorExperiment(const Matrix<double>& propagation, const FeatureMatrix& x,
                                 const MechanismSpec& spec, int trials, std::uint64_t seed) {
  if (propagation.rows() != x.rows() || propagation.cols() != x.rows()) {
    throw InputError("propagation matrix must be n x n for n feature rows");
  }
  return RunTrials(x, spec, trials, seed, [&](const FeatureMatrix& m) -> Matrix<double> {
    return propagation * m;
  });
}

ErrorTrialReport ErrorExperiment(const Graph& g, const FeatureMatrix& x,
                                 const MechanismSpec& spec,
                                 const PropagationParams<double>& params, int trials,
                                 std::uint64_t seed, PropagationMethod method) {
  params.Validate();
  if (x.rows() != g.num_nodes()) throw InputError("feature rows do not match graph");
  if (method == PropagationMethod::kDense) {
    const int terms = SeriesTermsFor(params.alpha, 1e-12);
    return ErrorExperiment(DensePropagationMatrix(g, params.alpha, params.r, terms), x, spec,
                           trials, seed);
  }
  return RunTrials(x, spec, trials, seed, [&](const FeatureMatrix& m) -> Matrix<double> {
    return BackwardPush(g, m, params);
  });
}

std::string FormatErrorReport(const ErrorTrialReport& r) {
  std::ostringstream out;
  out << "mechanism=" << ToString(r.spec.kind) << '\n'
      << "private=" << (r.spec.is_private() ? "true" : "false") << '\n'
      << "epsilon=" << FormatDouble(r.spec.epsilon) << '\n'
      << "d=" << r.d << '\n'
      << "k=" << r.spec.k << '\n'
      << "trials=" << r.trials << '\n'
      << "seed=" << r.seed << '\n'
      << "mean_error=" << FormatDouble(r.mean_error) << '\n'
      << "quantile_0.9=" << FormatDouble(r.quantile_90) << '\n'
      << "quantile_0.95=" << FormatDouble(r.quantile_95) << '\n';
  return out.str();
}

std::string FormatErrorCsv(const ErrorTrialReport& r, bool header) {
  std::string out = header ? "mechanism,epsilon,d,k,trial,error\n" : "";
  for (std::size_t t = 0; t < r.trial_errors.size(); ++t) {
    out += std::string(ToString(r.spec.kind)) + "," + FormatDouble(r.spec.epsilon) + "," +
           std::to_string(r.d) + "," + std::to_string(r.spec.k) + "," + std::to_string(t) +
           "," + FormatDouble(r.trial_errors[t]) + "\n";
  }
  return out;
}

}  // namespace ldpembed
