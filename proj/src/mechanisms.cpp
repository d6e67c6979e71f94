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
#include "ldpembed/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ldpembed/errors.hpp"
#include "ldpembed/parallel.hpp"

namespace ldpembed {
namespace {

void CheckBudget(double epsilon) {
  if (!(epsilon > 0)) {
    throw DomainError("privacy budget must be positive, got " + FormatDouble(epsilon));
  }
}

void CheckInput(double x) {
  if (!(std::abs(x) <= 1.0)) {
    throw DomainError("input " + FormatDouble(x) + " is outside [-1, 1]");
  }
}

void CheckSampling(int k, Eigen::Index d) {
  if (k < 1 || k > d) {
    throw DomainError("sampling parameter k=" + std::to_string(k) +
                      " must lie in [1, d=" + std::to_string(d) + "]");
  }
}

}  // namespace

std::string_view ToString(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kIdentity: return "none";
    case MechanismKind::kLaplace: return "laplace";
    case MechanismKind::kPiecewise: return "piecewise";
    case MechanismKind::kMultiBit: return "multibit";
    case MechanismKind::kHds: return "hds";
  }
  return "?";
}

MechanismKind ParseMechanismKind(std::string_view name) {
  if (name == "none" || name == "identity") return MechanismKind::kIdentity;
  if (name == "laplace" || name == "lp") return MechanismKind::kLaplace;
  if (name == "piecewise" || name == "pm") return MechanismKind::kPiecewise;
  if (name == "multibit" || name == "mb") return MechanismKind::kMultiBit;
  if (name == "hds" || name == "sw") return MechanismKind::kHds;
  throw ConfigError("unknown mechanism '" + std::string(name) + "'");
}

void MechanismSpec::Validate(Eigen::Index d) const {
  switch (kind) {
    case MechanismKind::kIdentity:
      return;
    case MechanismKind::kLaplace:
      CheckBudget(epsilon);
      return;
    default:
      CheckBudget(epsilon);
      CheckSampling(k, d);
  }
}

double SquareWaveBound(double epsilon) {
  CheckBudget(epsilon);
  if (std::isinf(epsilon)) return 0.0;
  if (epsilon < 0.5) {
    // numerator / eps^2 = sum_{n>=2} eps^(n-2) (n-1)/n!
    // (e^eps - eps - 1) / eps^2 = sum_{n>=2} eps^(n-2) / n!
    double num = 0;
    double den = 0;
    double term = 0.5;  // eps^(n-2) / n! at n = 2
    for (int n = 2; n < 30; ++n) {
      num += term * (n - 1);
      den += term;
      term *= epsilon / (n + 1);
    }
    return num / (std::exp(epsilon) * den);
  }
  // Numerator and denominator divided through by e^eps.
  return (epsilon - 1.0 + std::exp(-epsilon)) / (std::expm1(epsilon) - epsilon);
}

SquareWaveConstants SquareWaveConstants::ForBudget(double epsilon) {
  const double b = SquareWaveBound(epsilon);
  const double inv = std::exp(-epsilon);
  const double p = 1.0 / (2.0 * b + 2.0 * inv);
  return {epsilon, b, p, p * inv};
}

double SquareWavePdf(double x, double c, const SquareWaveConstants& sw) {
  CheckInput(x);
  if (c < -sw.b - 1.0 || c > 1.0 + sw.b) return 0.0;
  if (c >= x - sw.b && c <= x + sw.b) return sw.p;
  return sw.q;
}

double SquareWavePdf(double x, double c, double epsilon) {
  return SquareWavePdf(x, c, SquareWaveConstants::ForBudget(epsilon));
}

double SquareWavePerturb(double x, const SquareWaveConstants& sw, RngStream& rng) {
  CheckInput(x);
  const double eta = rng.Uniform();
  if (eta < sw.band_probability()) {
    return rng.Uniform(x - sw.b, x + sw.b);
  }
  // The two outer pieces have total length (x + 1) + (1 - x) = 2.
  const double u = rng.Uniform(0.0, 2.0);
  return u < x + 1.0 ? -sw.b - 1.0 + u : x + sw.b + (u - (x + 1.0));
}

double SquareWavePerturb(double x, double epsilon, RngStream& rng) {
  return SquareWavePerturb(x, SquareWaveConstants::ForBudget(epsilon), rng);
}

double SquareWaveMse(double x, double epsilon) {
  CheckInput(x);
  const auto sw = SquareWaveConstants::ForBudget(epsilon);
  const double hi = 1.0 + sw.b - x;
  const double lo = 1.0 + sw.b + x;
  return sw.q * (hi * hi * hi + lo * lo * lo) / 3.0 +
         (sw.p - sw.q) * 2.0 * sw.b * sw.b * sw.b / 3.0;
}

PiecewiseConstants PiecewiseConstants::ForBudget(double epsilon) {
  CheckBudget(epsilon);
  const double t = std::exp(epsilon / 2.0);
  const double em1 = std::expm1(epsilon / 2.0);
  const double s = (t + 1.0) / em1;
  const double p = (std::exp(epsilon) - t) / (2.0 * t + 2.0);
  return {epsilon, s, p, t / (t + 1.0)};
}

double PiecewisePerturb(double x, const PiecewiseConstants& pm, RngStream& rng) {
  CheckInput(x);
  const double l = pm.left(x);
  const double r = pm.right(x);
  if (rng.Uniform() < pm.band_probability) return rng.Uniform(l, r);
  const double left_len = l + pm.s;
  const double right_len = pm.s - r;
  const double u = rng.Uniform(0.0, left_len + right_len);
  if (right_len <= 0.0 || (left_len > 0.0 && u < left_len)) return -pm.s + u;
  return r + (u - left_len);
}

double HdsScale(double epsilon, int k, Eigen::Index d) {
  CheckBudget(epsilon);
  CheckSampling(k, d);
  const double e = epsilon / k;
  const double b = SquareWaveBound(e);
  return static_cast<double>(k) / static_cast<double>(d) * b * std::expm1(e) /
         (b * std::exp(e) + 1.0);
}

Moments HdsMoments(double x, double epsilon, int k, Eigen::Index d) {
  CheckInput(x);
  const double c = HdsScale(epsilon, k, d);
  const double e = std::exp(epsilon / k);
  const double b = SquareWaveBound(epsilon / k);
  const double base = k * (b * b * b * e + 3 * b * b + 3 * b + 1) /
                      (3.0 * static_cast<double>(d) * (b * e + 1));
  return {c * x, base + (c - c * c) * x * x};
}

Moments LaplaceMoments(double x, double epsilon, Eigen::Index d) {
  CheckInput(x);
  CheckBudget(epsilon);
  const double dd = static_cast<double>(d);
  return {x, 8.0 * dd * dd / (epsilon * epsilon)};
}

Moments PiecewiseMoments(double x, double epsilon, int k, Eigen::Index d) {
  CheckInput(x);
  CheckBudget(epsilon);
  CheckSampling(k, d);
  const double ratio = static_cast<double>(d) / k;
  const double t = std::exp(epsilon / (2.0 * k));
  const double em1 = std::expm1(epsilon / (2.0 * k));
  return {x, ratio * (t + 3) / (3 * em1 * em1) + (ratio * t / em1 - 1) * x * x};
}

Moments MultiBitMoments(double x, double epsilon, int k, Eigen::Index d) {
  CheckInput(x);
  CheckBudget(epsilon);
  CheckSampling(k, d);
  const double ratio = static_cast<double>(d) / k;
  const double f = (std::exp(epsilon / k) + 1) / std::expm1(epsilon / k);
  return {x, ratio * f * f - x * x};
}

Moments ClosedFormMoments(const MechanismSpec& spec, double x, Eigen::Index d) {
  switch (spec.kind) {
    case MechanismKind::kIdentity: CheckInput(x); return {x, 0.0};
    case MechanismKind::kLaplace: return LaplaceMoments(x, spec.epsilon, d);
    case MechanismKind::kPiecewise: return PiecewiseMoments(x, spec.epsilon, spec.k, d);
    case MechanismKind::kMultiBit: return MultiBitMoments(x, spec.epsilon, spec.k, d);
    case MechanismKind::kHds: return HdsMoments(x, spec.epsilon, spec.k, d);
  }
  return {0, 0};
}

double WorstCaseVariance(MechanismKind kind, double epsilon) {
  CheckBudget(epsilon);
  switch (kind) {
    case MechanismKind::kIdentity:
      return 0.0;
    case MechanismKind::kLaplace:
      return 8.0 / (epsilon * epsilon);
    case MechanismKind::kPiecewise:
    case MechanismKind::kMultiBit: {
      // Unbiased, and the variance is affine in x^2: extremes at x = 0, 1.
      const MechanismSpec spec{kind, epsilon, 1};
      return std::max(ClosedFormMoments(spec, 0.0, 1).variance,
                      ClosedFormMoments(spec, 1.0, 1).variance);
    }
    case MechanismKind::kHds: {
      constexpr int kGrid = 1001;
      double worst = 0.0;
      for (int i = 0; i < kGrid; ++i) {
        const double x = std::clamp(-1.0 + 2.0 * i / (kGrid - 1), -1.0, 1.0);
        worst = std::max(worst, SquareWaveMse(x, epsilon));
      }
      return worst;
    }
  }
  return 0.0;
}

std::vector<int> SampleWithoutReplacement(int d, int k, RngStream& rng) {
  CheckSampling(k, d);
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(d - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Perturber::Perturber(const MechanismSpec& spec, Eigen::Index d) : spec_(spec), d_(d) {
  if (d < 1) throw InputError("feature dimension must be positive");
  spec_.Validate(d);
  switch (spec_.kind) {
    case MechanismKind::kIdentity:
      per_dim_eps_ = std::numeric_limits<double>::infinity();
      break;
    case MechanismKind::kLaplace:
      per_dim_eps_ = spec_.epsilon / static_cast<double>(d);
      break;
    case MechanismKind::kHds:
      per_dim_eps_ = spec_.epsilon / spec_.k;
      sw_ = SquareWaveConstants::ForBudget(per_dim_eps_);
      break;
    case MechanismKind::kPiecewise:
      per_dim_eps_ = spec_.epsilon / spec_.k;
      pm_ = PiecewiseConstants::ForBudget(per_dim_eps_);
      break;
    case MechanismKind::kMultiBit: {
      per_dim_eps_ = spec_.epsilon / spec_.k;
      const double e = std::exp(per_dim_eps_);
      const double em1 = std::expm1(per_dim_eps_);
      mb_low_ = 1.0 / (e + 1.0);
      mb_slope_ = em1 / (e + 1.0);
      mb_scale_ = static_cast<double>(d) * (e + 1.0) / (spec_.k * em1);
      break;
    }
  }
}

Eigen::VectorXd Perturber::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                                      RngStream& rng) const {
  if (x.size() != d_) throw InputError("feature vector has wrong dimension");
  for (Eigen::Index j = 0; j < d_; ++j) CheckInput(x[j]);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  switch (spec_.kind) {
    case MechanismKind::kIdentity:
      return x;
    case MechanismKind::kLaplace: {
      const double scale = 2.0 / per_dim_eps_;
      for (Eigen::Index j = 0; j < d_; ++j) out[j] = x[j] + rng.Laplace(scale);
      return out;
    }
    default:
      break;
  }

  const double calib = static_cast<double>(d_) / spec_.k;
  for (int j : SampleWithoutReplacement(static_cast<int>(d_), spec_.k, rng)) {
    switch (spec_.kind) {
      case MechanismKind::kHds:
        out[j] = SquareWavePerturb(x[j], sw_, rng);
        break;
      case MechanismKind::kPiecewise:
        out[j] = calib * PiecewisePerturb(x[j], pm_, rng);
        break;
      case MechanismKind::kMultiBit: {
        const double up = mb_low_ + (x[j] + 1.0) / 2.0 * mb_slope_;
        out[j] = rng.Uniform() < up ? mb_scale_ : -mb_scale_;
        break;
      }
      default:
        break;
    }
  }
  return out;
}

Eigen::VectorXd HdsPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const MechanismSpec& spec, RngStream& rng) {
  MechanismSpec s = spec;
  s.kind = MechanismKind::kHds;
  return Perturber(s, x.size())(x, rng);
}

Eigen::VectorXd LaplacePerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double epsilon, RngStream& rng) {
  return Perturber({MechanismKind::kLaplace, epsilon, 1}, x.size())(x, rng);
}

Eigen::VectorXd PiecewiseVectorPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       double epsilon, int k, RngStream& rng) {
  return Perturber({MechanismKind::kPiecewise, epsilon, k}, x.size())(x, rng);
}

Eigen::VectorXd MultiBitPerturb(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double epsilon, int k, RngStream& rng) {
  return Perturber({MechanismKind::kMultiBit, epsilon, k}, x.size())(x, rng);
}

FeatureMatrix PerturbRows(const FeatureMatrix& x, const MechanismSpec& spec,
                          std::uint64_t seed, int threads) {
  const Perturber perturb(spec, x.cols());
  FeatureMatrix out(x.rows(), x.cols());
  if (!spec.is_private()) {
    out = x;
    return out;
  }
  // Validate up front: workers must not throw.
  if (x.size() > 0 && (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1.0)) {
    throw DomainError("features must be normalized into [-1, 1] before perturbation");
  }
  ParallelChunks(x.rows(), threads, [&](std::int64_t begin, std::int64_t end) {
    Eigen::VectorXd row(x.cols());
    for (Eigen::Index v = begin; v < end; ++v) {
      RngStream rng(seed, static_cast<std::uint64_t>(v));
      row = x.row(v).transpose();
      out.row(v) = perturb(row, rng).transpose();
    }
  });
  return out;
}

}  // namespace ldpembed
