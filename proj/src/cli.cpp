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
#include "ldpembed/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ldpembed/analysis.hpp"
#include "ldpembed/errors.hpp"
#include "ldpembed/eval.hpp"
#include "ldpembed/features.hpp"
#include "ldpembed/graph.hpp"
#include "ldpembed/mechanisms.hpp"
#include "ldpembed/propagation.hpp"
#include "ldpembed/rng.hpp"

namespace ldpembed {
namespace {

namespace fs = std::filesystem;

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flags shared by the subcommands. Unused fields stay at their defaults.
struct RunConfig {
  std::string subcommand;
  std::string edges;
  std::string features;
  std::string labels;
  std::string bounds;
  int top_classes = 0;
  std::vector<std::string> mechanisms{"hds"};
  std::vector<std::string> epsilons{"1"};
  int k = 1;
  double alpha = 0.1;
  double r = 0.5;
  double rmax = 1e-4;
  std::uint64_t seed = 0;
  int repeat = 10;
  std::string out;
  std::vector<double> split;
  double step = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  bool no_standardize = false;
  bool record_timing = false;
  // verify
  std::vector<std::string> suites{"all"};
  std::string inject_bug;
  std::int64_t samples = 200000;
  int trials = 10;
  // sbm-gen
  SbmConfig sbm;
  std::string format = "csv";
};

double ParseEpsilon(const std::string& text) {
  double v = 0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("bad epsilon value '" + text + "'");
  }
  if (!(v > 0)) throw ConfigError("epsilon must be positive or inf, got '" + text + "'");
  return v;
}

PropagationParams<double> PropagationFrom(const RunConfig& c) {
  PropagationParams<double> p{c.alpha, c.r, c.rmax};
  try {
    p.Validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

PipelineOptions PipelineFrom(const RunConfig& c) {
  PipelineOptions options;
  options.propagation = PropagationFrom(c);
  options.hyper = {c.step, c.iterations, c.l2, !c.no_standardize};
  if (!c.split.empty()) {
    if (c.split.size() != 3) throw ConfigError("--split takes three ratios");
    const SplitRatios ratios{c.split[0], c.split[1], c.split[2]};
    options.node_ratios = ratios;
    options.edge_ratios = ratios;
  }
  return options;
}

// Mechanism settings of a run in flag order. An infinite budget, or the
// `none` mechanism, selects the identity mechanism, listed once.
std::vector<MechanismSpec> ResolveSettings(const RunConfig& c) {
  std::vector<MechanismSpec> out;
  bool identity_seen = false;
  auto add_identity = [&] {
    if (identity_seen) return;
    identity_seen = true;
    out.push_back({MechanismKind::kIdentity, std::numeric_limits<double>::infinity(), c.k});
  };
  for (const auto& e : c.epsilons) {
    const double eps = ParseEpsilon(e);
    for (const auto& m : c.mechanisms) {
      const MechanismKind kind = ParseMechanismKind(m);
      if (std::isinf(eps) || kind == MechanismKind::kIdentity) {
        add_identity();
      } else {
        out.push_back({kind, eps, c.k});
      }
    }
  }
  if (out.empty()) throw ConfigError("no mechanism settings selected");
  return out;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

KeyValues EchoConfig(const RunConfig& c) {
  KeyValues kv{{"subcommand", c.subcommand}, {"seed", std::to_string(c.seed)}};
  auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  if (c.subcommand == "sbm-gen") {
    add("n", std::to_string(c.sbm.n));
    add("classes", std::to_string(c.sbm.classes));
    add("p_in", FormatDouble(c.sbm.p_in));
    add("p_out", FormatDouble(c.sbm.p_out));
    add("d", std::to_string(c.sbm.d));
    add("shift", FormatDouble(c.sbm.feature_shift));
    add("noise", FormatDouble(c.sbm.noise < 0 ? 1 - c.sbm.feature_shift : c.sbm.noise));
    add("format", c.format);
    return kv;
  }
  if (c.subcommand == "verify") {
    add("suites", Join(c.suites));
    add("inject_bug", c.inject_bug.empty() ? "none" : c.inject_bug);
    add("samples", std::to_string(c.samples));
    add("trials", std::to_string(c.trials));
    add("alpha", FormatDouble(c.alpha));
    add("r", FormatDouble(c.r));
    return kv;
  }
  add("edges", c.edges);
  add("features", c.features);
  add("bounds", c.bounds.empty() ? "data" : c.bounds);
  if (c.subcommand == "eval-node") {
    add("labels", c.labels);
    add("top_classes", std::to_string(c.top_classes));
  }
  add("mechanism", Join(c.mechanisms));
  add("epsilon", Join(c.epsilons));
  add("k", std::to_string(c.k));
  add("alpha", FormatDouble(c.alpha));
  add("r", FormatDouble(c.r));
  add("rmax", FormatDouble(c.rmax));
  if (c.subcommand != "embed") {
    const PipelineOptions o = PipelineFrom(c);
    const SplitRatios s = c.subcommand == "eval-node" ? o.node_ratios : o.edge_ratios;
    add("repeat", std::to_string(c.repeat));
    add("split", FormatDouble(s.train) + "," + FormatDouble(s.val) + "," +
                     FormatDouble(s.test));
    add("step", FormatDouble(c.step));
    add("iterations", std::to_string(c.iterations));
    add("l2", FormatDouble(c.l2));
    add("standardize", c.no_standardize ? "false" : "true");
  }
  return kv;
}

std::string FormatKeyValues(const KeyValues& kv, const std::string& prefix) {
  std::string out;
  for (const auto& [k, v] : kv) out += prefix + k + "=" + v + "\n";
  return out;
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

struct Dataset {
  Graph graph;
  FeatureMatrix features;  // normalized to [-1, 1]
  bool bounds_from_data = false;
};

Dataset LoadDataset(const RunConfig& c, std::ostream& err) {
  if (c.edges.empty()) throw ConfigError(c.subcommand + " needs --edges");
  if (c.features.empty()) throw ConfigError(c.subcommand + " needs --features");
  Dataset data;
  data.graph = LoadEdgeList(c.edges);
  const FeatureMatrix raw = LoadFeatures(c.features);
  if (raw.rows() < data.graph.num_nodes()) {
    throw InputError(c.features + ": " + std::to_string(raw.rows()) + " rows but " +
                     c.edges + " has " + std::to_string(data.graph.num_nodes()) + " nodes");
  }
  if (raw.rows() > data.graph.num_nodes()) {
    // Trailing nodes without edges are isolated.
    const auto edges = data.graph.Edges();
    data.graph = Graph::FromEdges(raw.rows(), edges);
  }
  FeatureBounds bounds;
  if (c.bounds.empty()) {
    bounds = ComputeBounds(raw);
    data.bounds_from_data = true;
    err << "warning: no --bounds given; using the data range, which is not private\n";
  } else {
    bounds = LoadBounds(c.bounds);
  }
  data.features = Normalize(raw, bounds);
  return data;
}

MechanismSpec SingleSetting(const RunConfig& c) {
  const auto settings = ResolveSettings(c);
  if (settings.size() != 1) throw ConfigError("embed takes one mechanism and one epsilon");
  return settings.front();
}

int CmdEmbed(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) throw ConfigError("embed needs --out");
  const MechanismSpec spec = SingleSetting(c);
  const PropagationParams<double> params = PropagationFrom(c);
  const auto start = std::chrono::steady_clock::now();
  const Dataset data = LoadDataset(c, err);
  spec.Validate(data.features.cols());

  const FeatureMatrix noisy = PerturbRows(data.features, spec, DeriveSeed(c.seed, 2));
  std::int64_t pushes = 0;
  const FeatureMatrix z = BackwardPush(data.graph, noisy, params, 0, &pushes);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  EnsureDirectory(c.out);
  const std::string matrix_path = (fs::path(c.out) / "embedding.pge").string();
  const std::string meta_path = (fs::path(c.out) / "embedding.meta").string();
  SaveFeaturesBinary(z, matrix_path);

  KeyValues meta = EchoConfig(c);
  meta.emplace_back("bounds_source", data.bounds_from_data ? "data" : "file");
  meta.emplace_back("resolved_mechanism", std::string(ToString(spec.kind)));
  meta.emplace_back("private", spec.is_private() ? "true" : "false");
  meta.emplace_back("n", std::to_string(z.rows()));
  meta.emplace_back("d", std::to_string(z.cols()));
  meta.emplace_back("edges_count", std::to_string(data.graph.num_edges()));
  meta.emplace_back("pushes", std::to_string(pushes));
  if (spec.kind == MechanismKind::kHds) {
    const auto sw = SquareWaveConstants::ForBudget(spec.epsilon / spec.k);
    meta.emplace_back("sw_b", FormatDouble(sw.b));
    meta.emplace_back("sw_p", FormatDouble(sw.p));
    meta.emplace_back("sw_q", FormatDouble(sw.q));
    meta.emplace_back("hds_C", FormatDouble(HdsScale(spec.epsilon, spec.k, z.cols())));
  }
  if (c.record_timing) meta.emplace_back("wall_clock_seconds", FormatDouble(seconds));
  meta.emplace_back("matrix", "embedding.pge");
  WriteFile(meta_path, FormatKeyValues(meta, ""));

  out << "wrote " << matrix_path << " (" << z.rows() << "x" << z.cols() << ")\n";
  err << "wall_clock_seconds=" << seconds << "\n";
  return kExitOk;
}

struct Summary {
  double mean = 0;
  double stddev = 0;
};

// Mean and sample standard deviation (0 for a single value).
Summary Summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

template <typename RunFn>
int RunEvaluation(const RunConfig& c, const std::string& metric, RunFn&& run,
                  std::ostream& out, std::ostream& err) {
  if (c.repeat < 1) throw ConfigError("--repeat must be at least 1");
  const auto settings = ResolveSettings(c);
  std::string csv = FormatKeyValues(EchoConfig(c), "# ");
  csv += "mechanism,epsilon,seed,metric,value,std\n";
  std::string summary;
  for (const auto& spec : settings) {
    std::vector<double> values;
    for (int i = 0; i < c.repeat; ++i) {
      const std::uint64_t run_seed = DeriveSeed(c.seed, static_cast<std::uint64_t>(i));
      const double value = run(spec, run_seed);
      values.push_back(value);
      csv += std::string(ToString(spec.kind)) + "," + FormatDouble(spec.epsilon) + "," +
             std::to_string(run_seed) + "," + metric + "," + FormatDouble(value) + ",\n";
    }
    const Summary s = Summarize(values);
    csv += std::string(ToString(spec.kind)) + "," + FormatDouble(spec.epsilon) + ",all," +
           metric + "," + FormatDouble(s.mean) + "," + FormatDouble(s.stddev) + "\n";
    std::ostringstream line;
    line.precision(4);
    line << std::fixed << ToString(spec.kind) << " epsilon=" << FormatDouble(spec.epsilon)
         << " " << metric << "=" << s.mean << " +- " << s.stddev << " (" << values.size()
         << " runs)\n";
    summary += line.str();
  }
  if (c.out.empty()) {
    out << csv;
    err << summary;
  } else {
    const fs::path parent = fs::path(c.out).parent_path();
    if (!parent.empty()) EnsureDirectory(parent.string());
    WriteFile(c.out, csv);
    out << summary;
  }
  return kExitOk;
}

int CmdEvalNode(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.labels.empty()) throw ConfigError("eval-node needs --labels");
  const PipelineOptions options = PipelineFrom(c);
  const Dataset data = LoadDataset(c, err);
  std::vector<int> labels = LoadLabels(c.labels);
  if (static_cast<NodeId>(labels.size()) != data.graph.num_nodes()) {
    throw InputError(c.labels + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(data.graph.num_nodes()) + " nodes");
  }
  if (c.top_classes > 0) RestrictToTopClasses(labels, c.top_classes);
  for (const auto& spec : ResolveSettings(c)) spec.Validate(data.features.cols());
  return RunEvaluation(
      c, "accuracy",
      [&](const MechanismSpec& spec, std::uint64_t seed) {
        return RunNodeClassification(data.graph, data.features, labels, spec, options, seed);
      },
      out, err);
}

int CmdEvalLink(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const PipelineOptions options = PipelineFrom(c);
  const Dataset data = LoadDataset(c, err);
  for (const auto& spec : ResolveSettings(c)) spec.Validate(data.features.cols());
  return RunEvaluation(
      c, "auc",
      [&](const MechanismSpec& spec, std::uint64_t seed) {
        return RunLinkPrediction(data.graph, data.features, spec, options, seed);
      },
      out, err);
}

// Collects PASS/FAIL lines of the verification suites.
class Report {
 public:
  void Check(bool ok, const std::string& what) {
    lines_ += (ok ? "PASS " : "FAIL ") + what + "\n";
    failures_ += ok ? 0 : 1;
  }
  const std::string& text() const { return lines_; }
  int failures() const { return failures_; }

 private:
  std::string lines_;
  int failures_ = 0;
};

std::string Num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void SuitePrivacy(const RunConfig& c, Report& report) {
  PrivacyCheckOptions options;
  if (c.inject_bug == "q-scale") options.q_scale = 1.1;
  for (double eps : {0.01, 0.1, 1.0, 2.0, 5.0}) {
    const PrivacyCheckResult r = PrivacyRatioCheck(eps, options);
    report.Check(r.passed, "privacy epsilon=" + Num(eps) + " max_ratio=" + Num(r.max_ratio) +
                               " bound=" + Num(r.bound) +
                               " normalization_error=" + Num(r.normalization_error));
  }
}

void SuiteMoments(const RunConfig& c, Report& report) {
  RngStream rng(c.seed, 0x6d6f6d);
  for (int i = 0; i < 5; ++i) {
    const double x = rng.Uniform(-1, 1);
    const double eps = rng.Uniform(0.5, 5);
    const int d = 1 + static_cast<int>(rng.UniformInt(8));
    const int k = 1 + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(d)));
    const MechanismSpec spec{MechanismKind::kHds, eps, k};
    const Moments m = HdsMoments(x, eps, k, d);
    const MomentEstimate est = EstimateMoments(spec, x, d, c.samples, DeriveSeed(c.seed, i));
    const bool mean_ok = std::abs(est.mean - m.mean) <= 4 * est.mean_stderr;
    const double rel = std::abs(est.variance - m.variance) / m.variance;
    report.Check(mean_ok && rel <= 0.05,
                 "moments hds x=" + Num(x) + " epsilon=" + Num(eps) + " k=" +
                     std::to_string(k) + " d=" + std::to_string(d) + " mean=" +
                     Num(est.mean) + " expected=" + Num(m.mean) + " variance=" +
                     Num(est.variance) + " expected=" + Num(m.variance));
  }
}

void SuiteBaselines(const RunConfig& c, Report& report) {
  int case_id = 0;
  for (MechanismKind kind :
       {MechanismKind::kLaplace, MechanismKind::kPiecewise, MechanismKind::kMultiBit}) {
    for (double eps : {1.0, 2.0}) {
      for (double x : {0.0, 0.6}) {
        const MechanismSpec spec{kind, eps, 1};
        const Moments m = ClosedFormMoments(spec, x, 1);
        const MomentEstimate est =
            EstimateMoments(spec, x, 1, c.samples, DeriveSeed(c.seed, 100 + case_id++));
        const double rel = std::abs(est.variance - m.variance) / m.variance;
        const bool mean_ok = std::abs(est.mean - m.mean) <= 4 * est.mean_stderr;
        report.Check(mean_ok && rel <= 0.05,
                     "baseline " + std::string(ToString(kind)) + " epsilon=" + Num(eps) +
                         " x=" + Num(x) + " variance=" + Num(est.variance) +
                         " expected=" + Num(m.variance));
      }
    }
  }
}

std::string SuiteVarianceCurve(Report& report) {
  const std::vector<double> eps{0.5, 1, 2, 3, 4, 5};
  const VarianceCurve curve = ComputeVarianceCurve(
      {MechanismKind::kHds, MechanismKind::kPiecewise, MechanismKind::kLaplace,
       MechanismKind::kMultiBit},
      eps);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] <= 3) {
      report.Check(curve.SquareWaveBelow(MechanismKind::kPiecewise, i),
                   "variance-curve epsilon=" + Num(eps[i]) + " sw<piecewise");
    }
    report.Check(curve.SquareWaveBelow(MechanismKind::kLaplace, i),
                 "variance-curve epsilon=" + Num(eps[i]) + " sw<laplace");
    report.Check(curve.SquareWaveBelow(MechanismKind::kMultiBit, i),
                 "variance-curve epsilon=" + Num(eps[i]) + " sw<multibit");
  }
  return FormatVarianceCurveCsv(curve);
}

std::string SuiteError(const RunConfig& c, Report& report) {
  const int n = 300;
  const int d = 64;
  const Graph g = ErdosRenyi(n, 0.02, DeriveSeed(c.seed, 0x6572));
  FeatureMatrix x(n, d);
  RngStream rng(DeriveSeed(c.seed, 0x6573), 0);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.Uniform(-1, 1);
  const PropagationParams<double> params = PropagationFrom(c);
  const Matrix<double> pi = DensePropagationMatrix<double>(
      g, params.alpha, params.r, SeriesTermsFor(params.alpha, 1e-12));
  const int k = (d + 99) / 100;
  std::string csv;
  const ErrorTrialReport identity =
      ErrorExperiment(pi, x, {MechanismKind::kIdentity, 1.0, k}, c.trials, c.seed);
  report.Check(identity.mean_error == 0, "error identity mean_error=" + Num(identity.mean_error));
  const ErrorTrialReport hds =
      ErrorExperiment(pi, x, {MechanismKind::kHds, 1.0, k}, c.trials, c.seed);
  csv += FormatErrorCsv(hds, true);
  for (MechanismKind kind :
       {MechanismKind::kLaplace, MechanismKind::kPiecewise, MechanismKind::kMultiBit}) {
    const ErrorTrialReport other = ErrorExperiment(pi, x, {kind, 1.0, k}, c.trials, c.seed);
    csv += FormatErrorCsv(other, false);
    report.Check(hds.mean_error < other.mean_error,
                 "error hds=" + Num(hds.mean_error) + " < " + std::string(ToString(kind)) +
                     "=" + Num(other.mean_error));
  }
  return csv;
}

int CmdVerify(const RunConfig& c, std::ostream& out, std::ostream& /*err*/) {
  const std::vector<std::string> known{"privacy", "moments", "baselines", "variance-curve",
                                       "error"};
  std::vector<std::string> suites;
  for (const auto& s : c.suites) {
    if (s == "all") {
      suites.insert(suites.end(), known.begin(), known.end());
    } else if (std::find(known.begin(), known.end(), s) != known.end()) {
      suites.push_back(s);
    } else {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  if (!c.inject_bug.empty() && c.inject_bug != "q-scale") {
    throw ConfigError("unknown --inject-bug mode '" + c.inject_bug + "'");
  }
  if (c.samples < 1000) throw ConfigError("--samples must be at least 1000");
  if (c.trials < 1) throw ConfigError("--trials must be at least 1");
  PropagationFrom(c);
  if (!c.out.empty()) EnsureDirectory(c.out);

  Report report;
  std::vector<std::pair<std::string, std::string>> tables;
  const std::string header = FormatKeyValues(EchoConfig(c), "# ");
  for (const auto& s : suites) {
    if (s == "privacy") SuitePrivacy(c, report);
    if (s == "moments") SuiteMoments(c, report);
    if (s == "baselines") SuiteBaselines(c, report);
    if (s == "variance-curve") tables.emplace_back("variance_curve.csv", SuiteVarianceCurve(report));
    if (s == "error") tables.emplace_back("error_trials.csv", SuiteError(c, report));
  }
  const std::string verdict = report.failures() == 0
                                  ? "verify: all checks passed\n"
                                  : "verify: " + std::to_string(report.failures()) +
                                        " check(s) failed\n";
  out << report.text();
  if (c.out.empty()) {
    for (const auto& [name, table] : tables) out << "\n" << header << table;
  } else {
    WriteFile((fs::path(c.out) / "verify_report.txt").string(),
              header + report.text() + verdict);
    for (const auto& [name, table] : tables) {
      WriteFile((fs::path(c.out) / name).string(), header + table);
    }
  }
  out << verdict;
  return report.failures() == 0 ? kExitOk : kExitAssertion;
}

int CmdSbmGen(const RunConfig& c, std::ostream& out, std::ostream& /*err*/) {
  if (c.out.empty()) throw ConfigError("sbm-gen needs --out");
  if (c.format != "csv" && c.format != "bin") throw ConfigError("--format must be csv or bin");
  SbmDataset data;
  try {
    data = GenerateSbm(c.sbm, c.seed);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  EnsureDirectory(c.out);
  const std::string header = FormatKeyValues(EchoConfig(c), "# ");
  const fs::path dir(c.out);
  WriteFile((dir / "edges.txt").string(), header + FormatEdgeList(data.graph));
  if (c.format == "csv") {
    WriteFile((dir / "features.csv").string(), header + FormatCsvMatrix(data.features));
  } else {
    SaveFeaturesBinary(data.features, (dir / "features.pge").string());
  }
  std::string labels = header;
  for (int l : data.labels) labels += std::to_string(l) + "\n";
  WriteFile((dir / "labels.txt").string(), labels);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(data.features.cols());
  SaveBounds({-ones, ones}, (dir / "bounds.csv").string());
  WriteFile((dir / "sbm.meta").string(),
            FormatKeyValues(EchoConfig(c), "") +
                "edges_count=" + std::to_string(data.graph.num_edges()) + "\n");
  out << "wrote " << c.out << ": " << data.graph.num_nodes() << " nodes, "
      << data.graph.num_edges() << " edges, d=" << data.features.cols() << "\n";
  return kExitOk;
}

void AddDatasetOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--edges", c.edges, "edge list file")->check(CLI::ExistingFile);
  cmd->add_option("--features", c.features, "feature matrix (CSV or PGE1 binary)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--bounds", c.bounds, "per-dimension bounds file (two CSV rows)")
      ->check(CLI::ExistingFile);
}

void AddMechanismOptions(CLI::App* cmd, RunConfig& c, bool lists) {
  auto* m = cmd->add_option("--mechanism", c.mechanisms,
                            "hds, laplace, piecewise, multibit or none");
  auto* e = cmd->add_option("--epsilon", c.epsilons, "privacy budget(s); inf = no noise");
  if (lists) {
    m->delimiter(',');
    e->delimiter(',');
  }
  cmd->add_option("--k", c.k, "dimensions sampled per user")->check(CLI::PositiveNumber);
}

void AddPropagationOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--alpha", c.alpha, "decay factor in (0, 1)");
  cmd->add_option("--r", c.r, "convolution coefficient in [0, 1]");
  cmd->add_option("--rmax", c.rmax, "backward push residue threshold");
}

void AddTrainingOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--repeat", c.repeat, "runs per setting");
  cmd->add_option("--split", c.split, "train,val,test ratios")->delimiter(',');
  cmd->add_option("--step", c.step, "gradient descent step");
  cmd->add_option("--iterations", c.iterations, "full-batch iterations");
  cmd->add_option("--l2", c.l2, "L2 penalty");
  cmd->add_flag("--no-standardize", c.no_standardize, "train on raw embedding columns");
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Locally private graph embedding toolkit", "ldpembed"};
  app.require_subcommand(1);

  auto* embed = app.add_subcommand("embed", "perturb features and propagate");
  AddDatasetOptions(embed, c);
  AddMechanismOptions(embed, c, false);
  AddPropagationOptions(embed, c);
  embed->add_option("--seed", c.seed, "master seed");
  embed->add_option("--out", c.out, "output directory");
  embed->add_flag("--record-timing", c.record_timing, "store wall-clock time in metadata");

  auto* node = app.add_subcommand("eval-node", "node classification accuracy");
  AddDatasetOptions(node, c);
  node->add_option("--labels", c.labels, "label file")->check(CLI::ExistingFile);
  node->add_option("--top-classes", c.top_classes, "keep only the most frequent classes");
  AddMechanismOptions(node, c, true);
  AddPropagationOptions(node, c);
  AddTrainingOptions(node, c);
  node->add_option("--seed", c.seed, "master seed");
  node->add_option("--out", c.out, "metrics CSV path (default: stdout)");

  auto* link = app.add_subcommand("eval-link", "link prediction AUC");
  AddDatasetOptions(link, c);
  AddMechanismOptions(link, c, true);
  AddPropagationOptions(link, c);
  AddTrainingOptions(link, c);
  link->add_option("--seed", c.seed, "master seed");
  link->add_option("--out", c.out, "metrics CSV path (default: stdout)");

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", c.suites,
                     "all, privacy, moments, baselines, variance-curve, error")
      ->delimiter(',');
  verify->add_option("--inject-bug", c.inject_bug, "test hook: q-scale");
  verify->add_option("--samples", c.samples, "Monte-Carlo samples per moment check");
  verify->add_option("--trials", c.trials, "trials of the error experiment");
  AddPropagationOptions(verify, c);
  verify->add_option("--seed", c.seed, "master seed");
  verify->add_option("--out", c.out, "directory for the report and tables");

  auto* sbm = app.add_subcommand("sbm-gen", "generate a stochastic block model dataset");
  c.sbm = SbmConfig{};
  sbm->add_option("--n", c.sbm.n, "nodes");
  sbm->add_option("--classes", c.sbm.classes, "communities");
  sbm->add_option("--p-in", c.sbm.p_in, "intra-community edge probability");
  sbm->add_option("--p-out", c.sbm.p_out, "inter-community edge probability");
  sbm->add_option("--d", c.sbm.d, "feature dimension");
  sbm->add_option("--shift", c.sbm.feature_shift, "class-indicator feature shift");
  sbm->add_option("--noise", c.sbm.noise, "uniform feature noise half-width (default 1 - shift)");
  sbm->add_option("--format", c.format, "features format: csv or bin");
  c.seed = 0;
  sbm->add_option("--seed", c.seed, "generator seed (default: the golden seed)");
  sbm->add_option("--out", c.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (embed->parsed()) {
      c.subcommand = "embed";
      return CmdEmbed(c, out, err);
    }
    if (node->parsed()) {
      c.subcommand = "eval-node";
      return CmdEvalNode(c, out, err);
    }
    if (link->parsed()) {
      c.subcommand = "eval-link";
      return CmdEvalLink(c, out, err);
    }
    if (verify->parsed()) {
      c.subcommand = "verify";
      return CmdVerify(c, out, err);
    }
    c.subcommand = "sbm-gen";
    if (sbm->get_option("--seed")->count() == 0) c.seed = kGoldenSbmSeed;
    return CmdSbmGen(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace ldpembed
