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
#ifndef LDPEMBED_MECHANISMS_HPP_
#define LDPEMBED_MECHANISMS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ldpembed/features.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {

// kIdentity is the non-private passthrough used for null tests and the
// epsilon = inf baseline. kHds with d = k = 1 is the one-dimensional square
// wave mechanism.
enum class MechanismKind { kIdentity, kLaplace, kPiecewise, kMultiBit, kHds };

std::string_view ToString(MechanismKind kind);
// Accepts "none"/"identity", "laplace"/"lp", "piecewise"/"pm",
// "multibit"/"mb", "hds"/"sw".
MechanismKind ParseMechanismKind(std::string_view name);

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kHds;
  double epsilon = 1.0;
  int k = 1;  // ignored by laplace and identity

  // Throws DomainError unless epsilon > 0 and 1 <= k <= d where relevant.
  void Validate(Eigen::Index d) const;
  bool is_private() const { return kind != MechanismKind::kIdentity; }
};

// Constants of the square wave density on [-b-1, 1+b] at budget epsilon:
// density p on [x-b, x+b], q elsewhere, with p / q = e^epsilon and
// 2bp + 2q = 1.
struct SquareWaveConstants {
  double epsilon;
  double b;
  double p;
  double q;

  static SquareWaveConstants ForBudget(double epsilon);

  // Probability that the report lands in the high-density band.
  double band_probability() const { return 2.0 * b * p; }
};

// Band half-width b(epsilon). Falls back to a Taylor series below 1e-3 where
// the closed form cancels catastrophically; b -> 1 as epsilon -> 0.
double SquareWaveBound(double epsilon);

double SquareWavePdf(double x, double c, const SquareWaveConstants& sw);
double SquareWavePdf(double x, double c, double epsilon);

// One draw of the square wave mechanism for x in [-1, 1].
double SquareWavePerturb(double x, const SquareWaveConstants& sw, RngStream& rng);
double SquareWavePerturb(double x, double epsilon, RngStream& rng);

// E[(report - x)^2] of the one-dimensional square wave mechanism, integrated
// in closed form over the piecewise-constant density.
double SquareWaveMse(double x, double epsilon);

struct PiecewiseConstants {
  double epsilon;
  double s;       // output range [-s, s]
  double p;       // in-band density
  double band_probability;

  static PiecewiseConstants ForBudget(double epsilon);
  double left(double x) const { return (s + 1) / 2 * x - (s - 1) / 2; }
  double right(double x) const { return left(x) + s - 1; }
};

// One draw of the one-dimensional piecewise mechanism (uncalibrated).
double PiecewisePerturb(double x, const PiecewiseConstants& pm, RngStream& rng);

struct Moments {
  double mean;
  double variance;
};

// Scale C with E[hds_j] = C x_j.
double HdsScale(double epsilon, int k, Eigen::Index d);
Moments HdsMoments(double x, double epsilon, int k, Eigen::Index d);
Moments LaplaceMoments(double x, double epsilon, Eigen::Index d);
Moments PiecewiseMoments(double x, double epsilon, int k, Eigen::Index d);
Moments MultiBitMoments(double x, double epsilon, int k, Eigen::Index d);
// Dispatches on spec.kind; identity has zero variance.
Moments ClosedFormMoments(const MechanismSpec& spec, double x, Eigen::Index d);

// max over x in [-1, 1] of E[(report - x)^2] in the one-dimensional setting.
// kHds evaluates the square wave on a 1001-point grid of x.
double WorstCaseVariance(MechanismKind kind, double epsilon);

// k distinct indices from [0, d) by partial Fisher-Yates.
std::vector<int> SampleWithoutReplacement(int d, int k, RngStream& rng);

// Stateless per-user randomizer with constants precomputed for a fixed
// (spec, d). Reports for unsampled dimensions are exactly 0; piecewise and
// multi-bit reports are calibrated to be unbiased, HDS reports are not.
class Perturber {
 public:
  Perturber(const MechanismSpec& spec, Eigen::Index d);

  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                             RngStream& rng) const;

  const MechanismSpec& spec() const { return spec_; }
  Eigen::Index dim() const { return d_; }
  // Budget spent on each sampled dimension (epsilon / k, or epsilon / d for
  // laplace).
  double per_dimension_budget() const { return per_dim_eps_; }

 private:
  MechanismSpec spec_;
  Eigen::Index d_;
  double per_dim_eps_;
  SquareWaveConstants sw_{};
  PiecewiseConstants pm_{};
  // Multi-bit: Pr[+1] = mb_low_ + (x + 1) / 2 * mb_slope_.
  double mb_low_ = 0;
  double mb_slope_ = 0;
  double mb_scale_ = 0;
};

Eigen::VectorXd HdsPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const MechanismSpec& spec, RngStream& rng);
Eigen::VectorXd LaplacePerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double epsilon, RngStream& rng);
Eigen::VectorXd PiecewiseVectorPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       double epsilon, int k, RngStream& rng);
Eigen::VectorXd MultiBitPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double epsilon, int k, RngStream& rng);

// Perturbs every row; row v draws from RngStream(seed, v), so the result is
// independent of the number of worker threads.
FeatureMatrix PerturbRows(const FeatureMatrix& x, const MechanismSpec& spec,
                          std::uint64_t seed, int threads = 0);

}  // namespace ldpembed

#endif  // LDPEMBED_MECHANISMS_HPP_
